//! Problem instances on K_p, a seeded instance generator, and an exact
//! backtracking solver for small orders.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::density::{check_dense, check_sparse};
use crate::error::ModelError;
use crate::model::{colors_for_order, floor_mul, Color, CompleteGraph, EdgeColoring, EdgeId, ListAssignment, Vertex};

pub const DEFAULT_ORACLE_CAP: usize = 12;
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMeta {
    pub seed: u64,
    pub alpha: Ratio<i64>,
    pub beta: Ratio<i64>,
}

/// Precoloring and lists on K_p with the color count fixed by the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub order: usize,
    pub colors: usize,
    pub phi: EdgeColoring,
    pub lists: ListAssignment,
    pub meta: Option<GeneratorMeta>,
}

impl Instance {
    pub fn empty(order: usize) -> Result<Instance, ModelError> {
        if order < 2 {
            return Err(ModelError::InvalidOrder(order));
        }
        let g = CompleteGraph::new(order);
        let t = colors_for_order(order);
        Ok(Instance {
            order,
            colors: t,
            phi: EdgeColoring::new(g.clone(), t),
            lists: ListAssignment::new(g, t),
            meta: None,
        })
    }

    pub fn graph(&self) -> &CompleteGraph {
        self.phi.graph()
    }

    /// Checks the color-count rule and that no precolored edge is listed
    /// with its own color.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.order < 2 {
            return Err(ModelError::InvalidOrder(self.order));
        }
        let t = colors_for_order(self.order);
        if self.colors != t || self.phi.num_colors() != t || self.lists.num_colors() != t {
            return Err(ModelError::Malformed(format!("K_{} needs {t} colors, got {}", self.order, self.colors)));
        }
        if self.phi.graph().order() != self.order || self.lists.graph().order() != self.order {
            return Err(ModelError::Malformed("precoloring, lists and order disagree".into()));
        }
        self.phi.check_consistency().map_err(ModelError::Malformed)?;
        self.lists.check_consistency().map_err(ModelError::Malformed)?;
        for (e, c) in self.phi.colored_edges() {
            if self.lists.contains(e, c) {
                let (u, v) = self.graph().endpoints(e);
                return Err(ModelError::Malformed(format!("edge {}-{} is precolored {c} and lists it", u + 1, v + 1)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("order must be at least 2, got {0}")]
    Order(usize),
    #[error("alpha and beta must lie in [0, 1]")]
    Range,
    #[error("generated instance fails its own check: {0}")]
    Check(String),
}

/// Precolored edges the generator aims for: `floor(αt)`, the most any
/// single color or vertex may carry.
pub fn precolor_target(p: usize, alpha: Ratio<i64>) -> usize {
    floor_mul(alpha, colors_for_order(p))
}

/// List entries the generator aims for: `ceil(floor(βt)·p / 2)`.
pub fn list_target(p: usize, beta: Ratio<i64>) -> usize {
    (floor_mul(beta, colors_for_order(p)) * p).div_ceil(2)
}

/// Random α-dense precoloring and β-sparse lists on K_p. Edges and colors
/// are drawn uniformly and kept only if every bound still holds, so the
/// instance satisfies both definitions by construction.
pub fn generate_instance(p: usize, alpha: Ratio<i64>, beta: Ratio<i64>, seed: u64) -> Result<Instance, GenerateError> {
    if p < 2 {
        return Err(GenerateError::Order(p));
    }
    let unit = Ratio::from_integer(1);
    let zero = Ratio::from_integer(0);
    if alpha < zero || alpha > unit || beta < zero || beta > unit {
        return Err(GenerateError::Range);
    }
    let mut inst = Instance::empty(p).map_err(|e| GenerateError::Check(e.to_string()))?;
    inst.meta = Some(GeneratorMeta { seed, alpha, beta });
    let t = inst.colors;
    let g = inst.graph().clone();
    let edges = g.edge_count();
    let a = floor_mul(alpha, t);
    let b = floor_mul(beta, t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let want = precolor_target(p, alpha);
    let mut placed = 0;
    for _ in 0..50 * want {
        if placed == want {
            break;
        }
        let e = EdgeId(rng.gen_range(0..edges));
        let c = rng.gen_range(1..=t);
        let (u, v) = g.endpoints(e);
        let phi = &inst.phi;
        if phi.is_colored(e) || phi.has_color_at(u, c) || phi.has_color_at(v, c) {
            continue;
        }
        if phi.class(c).len() >= a || phi.palette(u).count() >= a || phi.palette(v).count() >= a {
            continue;
        }
        inst.phi.set(e, c).expect("checked free at both ends");
        placed += 1;
    }

    let want = list_target(p, beta);
    let mut placed = 0;
    for _ in 0..50 * want {
        if placed == want {
            break;
        }
        let e = EdgeId(rng.gen_range(0..edges));
        let c = rng.gen_range(1..=t);
        let (u, v) = g.endpoints(e);
        let l = &inst.lists;
        if l.contains(e, c) || inst.phi.get(e) == Some(c) || l.list(e).len() >= b {
            continue;
        }
        if l.count_at(u, c) >= b || l.count_at(v, c) >= b {
            continue;
        }
        inst.lists.insert(e, c).expect("color in range");
        placed += 1;
    }

    if let Some(v) = check_dense(&inst.phi, a) {
        return Err(GenerateError::Check(format!("density: {v}")));
    }
    if let Some(v) = check_sparse(&inst.lists, b) {
        return Err(GenerateError::Check(format!("sparsity: {v}")));
    }
    inst.validate().map_err(|e| GenerateError::Check(e.to_string()))?;
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("order {order} exceeds the oracle cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Feasible(EdgeColoring),
    Infeasible,
}

impl OracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Feasible(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub cap: usize,
    pub node_budget: u64,
    /// Tie-break permutation seed for the edge order; `None` keeps id order.
    pub shuffle: Option<u64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: DEFAULT_ORACLE_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
            shuffle: None,
        }
    }
}

pub fn oracle_solve(inst: &Instance) -> Result<OracleOutcome, OracleError> {
    oracle_solve_with(inst, OracleConfig::default())
}

struct Search {
    t: usize,
    ends: Vec<(Vertex, Vertex)>,
    forbid: Vec<u64>,
    used: Vec<u64>,
    color: Vec<u8>,
    order: Vec<usize>,
    /// (color usage count, listed anywhere) for symmetry breaking.
    uses: Vec<u32>,
    listed: u64,
    nodes: u64,
    budget: u64,
}

/// Exhaustive search: most-constrained edge first; among colors that are
/// unused so far and appear in no list only the smallest is tried.
pub fn oracle_solve_with(inst: &Instance, cfg: OracleConfig) -> Result<OracleOutcome, OracleError> {
    inst.validate()?;
    if inst.order > cfg.cap {
        return Err(OracleError::CapExceeded { order: inst.order, cap: cfg.cap });
    }
    let g = inst.graph();
    let t = inst.colors;
    let p = g.order();
    let edges = g.edge_count();
    let mut s = Search {
        t,
        ends: (0..edges).map(|i| g.endpoints(EdgeId(i))).collect(),
        forbid: vec![0; edges],
        used: vec![0; p],
        color: vec![0; edges],
        order: (0..edges).collect(),
        uses: vec![0; t + 1],
        listed: 0,
        nodes: 0,
        budget: cfg.node_budget,
    };
    if let Some(seed) = cfg.shuffle {
        use rand::seq::SliceRandom;
        s.order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    for (e, l) in inst.lists.nonempty() {
        for &c in l {
            s.forbid[e.0] |= 1 << c;
            s.listed |= 1 << c;
        }
    }
    for (e, c) in inst.phi.colored_edges() {
        s.place(e.0, c);
    }
    let found = s.run()?;
    if !found {
        return Ok(OracleOutcome::Infeasible);
    }
    let mut out = EdgeColoring::new(g.clone(), t);
    for (i, &c) in s.color.iter().enumerate() {
        out.set(EdgeId(i), c as Color).expect("search keeps the coloring proper");
    }
    Ok(OracleOutcome::Feasible(out))
}

impl Search {
    fn place(&mut self, e: usize, c: Color) {
        let (u, v) = self.ends[e];
        self.color[e] = c as u8;
        self.used[u] |= 1 << c;
        self.used[v] |= 1 << c;
        self.uses[c] += 1;
    }

    fn unplace(&mut self, e: usize, c: Color) {
        let (u, v) = self.ends[e];
        self.color[e] = 0;
        self.used[u] &= !(1 << c);
        self.used[v] &= !(1 << c);
        self.uses[c] -= 1;
    }

    #[inline]
    fn domain(&self, e: usize) -> u64 {
        let all = ((1u64 << (self.t + 1)) - 1) & !1;
        let (u, v) = self.ends[e];
        all & !self.forbid[e] & !self.used[u] & !self.used[v]
    }

    fn run(&mut self) -> Result<bool, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::Budget(self.budget));
        }
        let mut best: Option<(u32, usize)> = None;
        for &e in &self.order {
            if self.color[e] != 0 {
                continue;
            }
            let k = self.domain(e).count_ones();
            if k == 0 {
                return Ok(false);
            }
            if best.is_none_or(|(bk, _)| k < bk) {
                best = Some((k, e));
                if k == 1 {
                    break;
                }
            }
        }
        let Some((_, e)) = best else { return Ok(true) };
        let mut dom = self.domain(e);
        let mut tried_fresh = false;
        while dom != 0 {
            let c = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            let fresh = self.uses[c] == 0 && self.listed & (1 << c) == 0;
            if fresh {
                if tried_fresh {
                    continue;
                }
                tried_fresh = true;
            }
            self.place(e, c);
            if self.run()? {
                return Ok(true);
            }
            self.unplace(e, c);
        }
        Ok(false)
    }
}
