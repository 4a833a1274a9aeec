//! Absorbing the conflict edges of h′ into the precoloring.

use thiserror::Error;

use crate::model::{Color, CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet};

/// How many newly prescribed edges carry each color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverloadLedger {
    pub counts: Vec<usize>,
    pub threshold: usize,
}

impl OverloadLedger {
    pub fn new(colors: usize, threshold: usize) -> OverloadLedger {
        OverloadLedger {
            counts: vec![0; colors + 1],
            threshold,
        }
    }

    pub fn is_overloaded(&self, c: Color) -> bool {
        self.counts[c] >= self.threshold
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Why each color was unavailable for an edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exclusions {
    pub listed: usize,
    pub adjacent: usize,
    pub overloaded: usize,
    /// Missing at an endpoint under h′ (odd n).
    pub palette: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("precolored edge {0} carries a color from its list")]
    PrecoloredConflict(EdgeId),
    #[error(
        "no color left for conflict edge {edge} (listed {}, adjacent {}, overloaded {}, palette {})",
        why.listed, why.adjacent, why.overloaded, why.palette
    )]
    Infeasible { edge: EdgeId, why: Exclusions },
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub phi_prime: EdgeColoring,
    pub ledger: OverloadLedger,
    /// Conflict edges that were newly colored, ascending.
    pub added: Vec<EdgeId>,
}

/// Colors every conflict edge of `hprime` that `phi` leaves uncolored, in
/// ascending edge order, with the smallest color that is not listed, not
/// already at either endpoint, not on `f(n)` new edges, and (when `hprime`
/// misses colors at vertices) present at both endpoints.
pub fn extend_to_phi_prime(
    index: &CompleteGraphIndex,
    phi: &EdgeColoring,
    hprime: &EdgeColoring,
    lists: &ListAssignment,
    params: &ParameterSet,
) -> Result<Extension, ExtendError> {
    let m = index.m();
    for (e, c) in phi.colored_edges() {
        if lists.contains(e, c) {
            return Err(ExtendError::PrecoloredConflict(e));
        }
    }
    let mut out = phi.clone();
    let mut ledger = OverloadLedger::new(m, params.f_n);
    let mut added = Vec::new();
    let mut conflicts: Vec<EdgeId> = lists
        .nonempty()
        .map(|(e, _)| e)
        .filter(|&e| !phi.is_colored(e) && lists.contains(e, hprime.raw(e)))
        .collect();
    conflicts.sort();
    for e in conflicts {
        let (u, v) = index.endpoints(e);
        let mut why = Exclusions::default();
        let pick = (1..=m).find(|&c| {
            if lists.contains(e, c) {
                why.listed += 1;
            } else if out.has_color_at(u, c) || out.has_color_at(v, c) {
                why.adjacent += 1;
            } else if ledger.is_overloaded(c) {
                why.overloaded += 1;
            } else if !hprime.has_color_at(u, c) || !hprime.has_color_at(v, c) {
                why.palette += 1;
            } else {
                return true;
            }
            false
        });
        let Some(c) = pick else {
            return Err(ExtendError::Infeasible { edge: e, why });
        };
        out.set(e, c).expect("color is free at both endpoints");
        ledger.counts[c] += 1;
        added.push(e);
    }
    Ok(Extension {
        phi_prime: out,
        ledger,
        added,
    })
}
