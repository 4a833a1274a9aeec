//! List edge coloring of complete graphs K_{2n} and K_{2n-1}: extending a
//! sparse precoloring to a proper coloring that avoids sparse lists.

pub mod density;
pub mod error;
pub mod exec;
pub mod extend;
pub mod model;
pub mod oracle;
pub mod orchestrator;
pub mod permute;
pub mod standard;
pub mod swap;

pub use num_rational;
