//! The `verify` scans, written against the file data only: coverage and
//! properness, agreement with the precoloring, avoidance of the lists.

use edge_extend::model::Color;
use edge_extend::oracle::Instance;

/// Human-readable violations of `colors` (indexed by edge id, 0 for none);
/// vertices are 1-based.
pub fn violations(inst: &Instance, colors: &[Color]) -> Vec<String> {
    let g = inst.graph();
    let mut out = Vec::new();
    let mut at: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; inst.colors + 1]; inst.order];
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        let (u1, v1) = (u.min(v) + 1, u.max(v) + 1);
        let c = colors.get(e.0).copied().unwrap_or(0);
        if c == 0 || c > inst.colors {
            out.push(format!("edge {u1} {v1} has no color in 1..={}", inst.colors));
            continue;
        }
        for w in [u, v] {
            match at[w][c] {
                Some((a, b)) => out.push(format!("edges {a} {b} and {u1} {v1} share color {c} at vertex {}", w + 1)),
                None => at[w][c] = Some((u1, v1)),
            }
        }
    }
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        let (u1, v1) = (u.min(v) + 1, u.max(v) + 1);
        let c = colors.get(e.0).copied().unwrap_or(0);
        if let Some(want) = inst.phi.get(e) {
            if c != want {
                out.push(format!("edge {u1} {v1} is precolored {want} but has {c}"));
            }
        }
        if inst.lists.list(e).contains(&c) {
            out.push(format!("edge {u1} {v1} has color {c} from its list"));
        }
    }
    out
}
