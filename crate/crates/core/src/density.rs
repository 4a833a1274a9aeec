//! Density and sparsity checks of instances, and the post-relabeling
//! conditions a relabeled standard coloring must satisfy.

use std::fmt;

use crate::exec::Strategy;
use crate::model::{Color, CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet, Part, Vertex};
use crate::standard::census_with;
use crate::swap::is_allowed_cycle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Vertex(Vertex),
    Color(Color),
    /// `(listed color, edge color)`.
    ColorPair(Color, Color),
    Edge(EdgeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub witness: Witness,
    pub count: usize,
    pub bound: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} > {}", self.witness, self.count, self.bound)
    }
}

/// First violation in scan order, if any.
fn first_over<I: IntoIterator<Item = (Witness, usize)>>(items: I, bound: usize) -> Option<Violation> {
    items
        .into_iter()
        .find(|&(_, c)| c > bound)
        .map(|(witness, count)| Violation { witness, count, bound })
}

/// Every color on at most `bound` edges and every vertex on at most `bound`
/// precolored edges.
pub fn check_dense(phi: &EdgeColoring, bound: usize) -> Option<Violation> {
    let colors = (1..=phi.num_colors()).map(|c| (Witness::Color(c), phi.class(c).len()));
    if let Some(v) = first_over(colors, bound) {
        return Some(v);
    }
    let p = phi.graph().order();
    first_over((0..p).map(|v| (Witness::Vertex(v), phi.palette(v).count())), bound)
}

pub fn check_alpha_dense(phi: &EdgeColoring, params: &ParameterSet) -> Option<Violation> {
    check_dense(phi, params.alpha_m())
}

/// Every list has at most `bound` colors and every color is listed on at
/// most `bound` edges at each vertex.
pub fn check_sparse(lists: &ListAssignment, bound: usize) -> Option<Violation> {
    let edges = lists.nonempty().map(|(e, l)| (Witness::Edge(e), l.len()));
    if let Some(v) = first_over(edges, bound) {
        return Some(v);
    }
    let p = lists.graph().order();
    let t = lists.num_colors();
    for v in 0..p {
        for c in 1..=t {
            let k = lists.count_at(v, c);
            if k > bound {
                return Some(Violation {
                    witness: Witness::ColorPair(c, v),
                    count: k,
                    bound,
                });
            }
        }
    }
    None
}

pub fn check_beta_sparse(lists: &ListAssignment, params: &ParameterSet) -> Option<Violation> {
    check_sparse(lists, params.beta_m())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    /// Few K_{n,n} edges lie in too few allowed strong cycles.
    A,
    /// K_{n,n} conflicts per vertex.
    B,
    /// K_{n,n} conflicts per color.
    C,
    /// K_{n,n} prescribed edges per color.
    D,
    /// K_{n,n} edges of one color listing another.
    E,
    /// Clique conflicts per vertex.
    F,
    /// Clique conflicts per color and clique.
    G,
    /// Clique prescribed edges per color and clique.
    H,
    /// Clique edges of one color listing another, per clique.
    I,
    /// All conflicts per vertex.
    APrime,
    /// All conflicts and prescriptions per color.
    BPrime,
    /// All edges of one color listing another.
    CPrime,
    /// Odd n only: each prescribed color occurs at both endpoints under h′.
    Palette,
}

impl ConditionId {
    pub const ALL: [ConditionId; 13] = [
        ConditionId::A,
        ConditionId::B,
        ConditionId::C,
        ConditionId::D,
        ConditionId::E,
        ConditionId::F,
        ConditionId::G,
        ConditionId::H,
        ConditionId::I,
        ConditionId::APrime,
        ConditionId::BPrime,
        ConditionId::CPrime,
        ConditionId::Palette,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConditionId::A => "a",
            ConditionId::B => "b",
            ConditionId::C => "c",
            ConditionId::D => "d",
            ConditionId::E => "e",
            ConditionId::F => "f",
            ConditionId::G => "g",
            ConditionId::H => "h",
            ConditionId::I => "i",
            ConditionId::APrime => "a'",
            ConditionId::BPrime => "b'",
            ConditionId::CPrime => "c'",
            ConditionId::Palette => "palette",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionResult {
    pub id: ConditionId,
    pub witness: Option<Violation>,
}

impl ConditionResult {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub results: Vec<ConditionResult>,
    /// K_{n,n} edges below the strong-cycle threshold, ascending.
    pub deficient_edges: Vec<EdgeId>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> + '_ {
        self.results.iter().filter(|r| !r.pass())
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn get(&self, id: ConditionId) -> &ConditionResult {
        self.results
            .iter()
            .find(|r| r.id == id)
            .expect("every condition is evaluated")
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for r in &self.results {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match r.witness {
                None => write!(f, "({})ok", r.id.label())?,
                Some(v) => write!(f, "({})FAIL[{v}]", r.id.label())?,
            }
        }
        Ok(())
    }
}

#[inline]
pub fn is_conflict(h: &EdgeColoring, lists: &ListAssignment, e: EdgeId) -> bool {
    let c = h.raw(e);
    c != 0 && lists.contains(e, c)
}

/// Allowed strong cycles counted per K_{n,n} edge; edges below the (a)
/// threshold are returned ascending.
pub fn deficient_edges(index: &CompleteGraphIndex, h: &EdgeColoring, lists: &ListAssignment, params: &ParameterSet, strategy: Strategy) -> Vec<EdgeId> {
    let census = census_with(index, h, params.strong_threshold(), strategy, |cyc| is_allowed_cycle(h, cyc, lists));
    census
        .counts
        .iter()
        .filter(|c| c.1 < census.threshold)
        .map(|c| c.0)
        .collect()
}

/// Evaluates every post-relabeling condition on `h` (a relabeled standard
/// coloring) against the precoloring `phi` and lists.
pub fn check_hprime_conditions(index: &CompleteGraphIndex, h: &EdgeColoring, phi: &EdgeColoring, lists: &ListAssignment, params: &ParameterSet) -> ConditionReport {
    check_hprime_conditions_with(index, h, phi, lists, params, Strategy::Sequential)
}

pub fn check_hprime_conditions_with(
    index: &CompleteGraphIndex,
    h: &EdgeColoring,
    phi: &EdgeColoring,
    lists: &ListAssignment,
    params: &ParameterSet,
    strategy: Strategy,
) -> ConditionReport {
    let n = index.n();
    let m = index.m();
    let p = index.vertex_count();
    let c = params.c_n;
    let cp = params.cprime_n;
    let k = m + 1;

    // Tallies: [part][color] and [part][listed][color]; part 0 = Knn, 1 = G1, 2 = G2.
    let mut conflicts_v_knn = vec![0usize; p];
    let mut conflicts_v_clique = vec![0usize; p];
    let mut conflicts_c = vec![vec![0usize; k]; 3];
    let mut prescribed_c = vec![vec![0usize; k]; 3];
    let mut listed = vec![vec![0usize; k * k]; 3];
    let part_ix = |e: EdgeId| match index.part(e) {
        Part::Knn => 0,
        Part::G1 => 1,
        Part::G2 => 2,
    };
    for e in index.graph().edges() {
        let col = h.raw(e);
        let part = part_ix(e);
        let (u, v) = index.endpoints(e);
        if is_conflict(h, lists, e) {
            conflicts_c[part][col] += 1;
            let tally = if part == 0 { &mut conflicts_v_knn } else { &mut conflicts_v_clique };
            tally[u] += 1;
            tally[v] += 1;
        }
        if phi.is_colored(e) {
            prescribed_c[part][col] += 1;
        }
        for &l in lists.list(e) {
            listed[part][l * k + col] += 1;
        }
    }

    let low = 1..=n;
    let high = n + 1..=m;
    let mut results = Vec::with_capacity(ConditionId::ALL.len());
    let mut push = |id, witness| results.push(ConditionResult { id, witness });

    let deficient = deficient_edges(index, h, lists, params, strategy);
    let allowance = params.deficiency_allowance();
    push(
        ConditionId::A,
        (deficient.len() > allowance).then(|| Violation {
            witness: Witness::Edge(deficient[0]),
            count: deficient.len(),
            bound: allowance,
        }),
    );
    push(ConditionId::B, first_over((0..p).map(|v| (Witness::Vertex(v), conflicts_v_knn[v])), cp));
    push(ConditionId::C, first_over(low.clone().map(|col| (Witness::Color(col), conflicts_c[0][col])), c));
    push(ConditionId::D, first_over(low.clone().map(|col| (Witness::Color(col), prescribed_c[0][col])), c));
    let pairs = |part: usize, range: std::ops::RangeInclusive<Color>| {
        let listed = &listed[part];
        (1..=m).flat_map(move |l| range.clone().map(move |col| (Witness::ColorPair(l, col), listed[l * k + col])))
    };
    push(ConditionId::E, first_over(pairs(0, low.clone()), c));
    push(ConditionId::F, first_over((0..p).map(|v| (Witness::Vertex(v), conflicts_v_clique[v])), cp));
    fn per_clique(table: &[Vec<usize>], high: std::ops::RangeInclusive<Color>) -> impl Iterator<Item = (Witness, usize)> + '_ {
        [1, 2].into_iter().flat_map(move |part| high.clone().map(move |col| (Witness::Color(col), table[part][col])))
    }
    push(ConditionId::G, first_over(per_clique(&conflicts_c, high.clone()), c));
    push(ConditionId::H, first_over(per_clique(&prescribed_c, high.clone()), c));
    push(ConditionId::I, first_over([1, 2].into_iter().flat_map(|part| pairs(part, high.clone())), c));

    // Derived conditions, with bounds obtained by adding the part-wise bounds
    // that contribute to each count.
    push(
        ConditionId::APrime,
        first_over((0..p).map(|v| (Witness::Vertex(v), conflicts_v_knn[v] + conflicts_v_clique[v])), 2 * cp),
    );
    let b_prime = (1..=m).find_map(|col| {
        let bound = if col <= n { c } else { 2 * c };
        let conf: usize = (0..3).map(|part| conflicts_c[part][col]).sum();
        let pres: usize = (0..3).map(|part| prescribed_c[part][col]).sum();
        let count = conf.max(pres);
        (count > bound).then_some(Violation {
            witness: Witness::Color(col),
            count,
            bound,
        })
    });
    push(ConditionId::BPrime, b_prime);
    let c_prime = (1..=m).find_map(|l| {
        (1..=m).find_map(|col| {
            let bound = if col <= n { c } else { 2 * c };
            let count: usize = (0..3).map(|part| listed[part][l * k + col]).sum();
            (count > bound).then_some(Violation {
                witness: Witness::ColorPair(l, col),
                count,
                bound,
            })
        })
    });
    push(ConditionId::CPrime, c_prime);

    // Swaps never change which colors meet a vertex, so a prescribed color
    // missing at an endpoint can never be placed. Only odd n has such gaps.
    let palette = phi.colored_edges().find_map(|(e, col)| {
        let (u, v) = index.endpoints(e);
        [u, v].into_iter().find(|&w| !h.has_color_at(w, col)).map(|w| Violation {
            witness: Witness::Vertex(w),
            count: col,
            bound: 0,
        })
    });
    push(ConditionId::Palette, palette);

    ConditionReport {
        results,
        deficient_edges: deficient,
    }
}
