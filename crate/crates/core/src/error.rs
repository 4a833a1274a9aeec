use thiserror::Error;

use crate::model::{Color, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("order parameter n must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("invalid edge id {0}")]
    InvalidEdge(usize),
    #[error("invalid vertex pair ({u}, {v}) for order {order}")]
    InvalidPair { u: Vertex, v: Vertex, order: usize },
    #[error("color {color} outside 1..={max}")]
    ColorOutOfRange { color: Color, max: usize },
    #[error("color {color} already used at vertex {vertex}")]
    Improper { vertex: Vertex, color: Color },
    #[error("{0:?} is not a 2-colored 4-cycle")]
    NotTwoColored([Vertex; 4]),
    #[error("malformed instance: {0}")]
    Malformed(String),
}
