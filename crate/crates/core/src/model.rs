//! Complete graphs, their K_{n,n} + G1 + G2 decomposition, colorings and lists.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::ModelError;

pub type Vertex = usize;
pub type Color = usize;

/// Sentinel stored in the vertex/color table when a color is absent.
const NONE: u32 = u32::MAX;

/// Dense id of an unordered vertex pair `{u, v}`: `max*(max-1)/2 + min`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn of(u: Vertex, v: Vertex) -> EdgeId {
        debug_assert_ne!(u, v);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        EdgeId(b * (b - 1) / 2 + a)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Edge enumeration of K_p. Ids are independent of `p`, so K_p embeds in
/// K_{p+1} without renumbering.
#[derive(Clone, Debug)]
pub struct CompleteGraph {
    order: usize,
    endpoints: Arc<[(u32, u32)]>,
}

impl PartialEq for CompleteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}
impl Eq for CompleteGraph {}

impl CompleteGraph {
    pub fn new(order: usize) -> CompleteGraph {
        let mut endpoints = Vec::with_capacity(order * order.saturating_sub(1) / 2);
        for b in 1..order {
            for a in 0..b {
                endpoints.push((a as u32, b as u32));
            }
        }
        CompleteGraph {
            order,
            endpoints: endpoints.into(),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    #[inline]
    pub fn edge(&self, u: Vertex, v: Vertex) -> EdgeId {
        debug_assert!(u < self.order && v < self.order);
        EdgeId::of(u, v)
    }

    pub fn try_edge(&self, u: Vertex, v: Vertex) -> Result<EdgeId, ModelError> {
        if u >= self.order || v >= self.order || u == v {
            return Err(ModelError::InvalidPair { u, v, order: self.order });
        }
        Ok(EdgeId::of(u, v))
    }

    /// Endpoints `(min, max)`.
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        let (a, b) = self.endpoints[e.0];
        (a as usize, b as usize)
    }

    #[inline]
    pub fn other(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        e.0 < self.edge_count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Knn,
    G1,
    G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// p_1..p_n, the G1 side.
    P,
    /// q_1..q_n, the G2 side.
    Q,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::P => Side::Q,
            Side::Q => Side::P,
        }
    }

    pub fn clique(self) -> Part {
        match self {
            Side::P => Part::G1,
            Side::Q => Part::G2,
        }
    }
}

/// K_{2n} with vertices 0..n-1 = p_1..p_n and n..2n-1 = q_1..q_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteGraphIndex {
    n: usize,
    m: usize,
    graph: CompleteGraph,
}

impl CompleteGraphIndex {
    pub fn new(n: usize) -> Result<CompleteGraphIndex, ModelError> {
        if n < 2 {
            return Err(ModelError::InvalidOrder(n));
        }
        Ok(CompleteGraphIndex {
            n,
            m: color_count(n),
            graph: CompleteGraph::new(2 * n),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of colors: 2n-1 for even n, 2n for odd n.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn graph(&self) -> &CompleteGraph {
        &self.graph
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    #[inline]
    pub fn edge(&self, u: Vertex, v: Vertex) -> EdgeId {
        self.graph.edge(u, v)
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.graph.endpoints(e)
    }

    #[inline]
    pub fn other(&self, e: EdgeId, v: Vertex) -> Vertex {
        self.graph.other(e, v)
    }

    /// Vertex p_i (1-based i).
    #[inline]
    pub fn p(&self, i: usize) -> Vertex {
        debug_assert!((1..=self.n).contains(&i));
        i - 1
    }

    /// Vertex q_i (1-based i).
    #[inline]
    pub fn q(&self, i: usize) -> Vertex {
        debug_assert!((1..=self.n).contains(&i));
        self.n + i - 1
    }

    #[inline]
    pub fn side(&self, v: Vertex) -> Side {
        if v < self.n {
            Side::P
        } else {
            Side::Q
        }
    }

    pub fn side_vertices(&self, side: Side) -> std::ops::Range<Vertex> {
        match side {
            Side::P => 0..self.n,
            Side::Q => self.n..2 * self.n,
        }
    }

    #[inline]
    pub fn part(&self, e: EdgeId) -> Part {
        let (a, b) = self.graph.endpoints(e);
        match (a < self.n, b < self.n) {
            (true, true) => Part::G1,
            (false, false) => Part::G2,
            _ => Part::Knn,
        }
    }

    pub fn classify_edge(&self, e: EdgeId) -> Result<Part, ModelError> {
        if !self.graph.contains(e) {
            return Err(ModelError::InvalidEdge(e.0));
        }
        Ok(self.part(e))
    }

    #[inline]
    pub fn is_knn(&self, e: EdgeId) -> bool {
        self.part(e) == Part::Knn
    }

    /// Colors 1..n are the K_{n,n} colors.
    #[inline]
    pub fn is_low(&self, c: Color) -> bool {
        (1..=self.n).contains(&c)
    }

    #[inline]
    pub fn is_high(&self, c: Color) -> bool {
        c > self.n && c <= self.m
    }

    pub fn knn_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (n..2 * n).map(move |j| EdgeId::of(i, j)))
    }

    pub fn part_edges(&self, part: Part) -> impl Iterator<Item = EdgeId> + '_ {
        self.graph.edges().filter(move |&e| self.part(e) == part)
    }

    /// For a K_{n,n} edge, the (P-side, Q-side) endpoints.
    #[inline]
    pub fn knn_endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        let (a, b) = self.graph.endpoints(e);
        debug_assert!(a < self.n && b >= self.n);
        (a, b)
    }
}

pub fn color_count(n: usize) -> usize {
    if n % 2 == 0 {
        2 * n - 1
    } else {
        2 * n
    }
}

/// Colors for K_p with `p` in {4r, 4r-1} -> 4r-1 and {4r-2, 4r-3} -> 4r-2.
pub fn colors_for_order(p: usize) -> usize {
    color_count(p.div_ceil(2))
}

/// A proper, possibly partial, edge coloring of a complete graph.
///
/// Keeps a vertex-by-color table pointing at the other endpoint so that
/// "the c-edge at v" lookups are O(1), plus per-color edge sets.
#[derive(Clone, Debug)]
pub struct EdgeColoring {
    graph: CompleteGraph,
    colors: usize,
    color: Vec<u16>,
    nbr: Vec<u32>,
    class: Vec<BTreeSet<EdgeId>>,
    assigned: usize,
}

impl PartialEq for EdgeColoring {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.colors == other.colors && self.color == other.color
    }
}
impl Eq for EdgeColoring {}

impl EdgeColoring {
    pub fn new(graph: CompleteGraph, colors: usize) -> EdgeColoring {
        let p = graph.order();
        EdgeColoring {
            color: vec![0; graph.edge_count()],
            nbr: vec![NONE; p * (colors + 1)],
            class: vec![BTreeSet::new(); colors + 1],
            graph,
            colors,
            assigned: 0,
        }
    }

    pub fn for_index(index: &CompleteGraphIndex) -> EdgeColoring {
        EdgeColoring::new(index.graph().clone(), index.m())
    }

    #[inline]
    pub fn graph(&self) -> &CompleteGraph {
        &self.graph
    }

    #[inline]
    pub fn num_colors(&self) -> usize {
        self.colors
    }

    #[inline]
    pub fn get(&self, e: EdgeId) -> Option<Color> {
        match self.color[e.0] {
            0 => None,
            c => Some(c as Color),
        }
    }

    /// Color of `e`, or 0 when uncolored.
    #[inline]
    pub fn raw(&self, e: EdgeId) -> Color {
        self.color[e.0] as Color
    }

    #[inline]
    pub fn is_colored(&self, e: EdgeId) -> bool {
        self.color[e.0] != 0
    }

    /// The vertex joined to `v` by an edge colored `c`.
    #[inline]
    pub fn neighbor(&self, v: Vertex, c: Color) -> Option<Vertex> {
        match self.nbr[v * (self.colors + 1) + c] {
            NONE => None,
            w => Some(w as Vertex),
        }
    }

    /// The edge at `v` colored `c`.
    #[inline]
    pub fn edge_at(&self, v: Vertex, c: Color) -> Option<EdgeId> {
        self.neighbor(v, c).map(|w| EdgeId::of(v, w))
    }

    #[inline]
    pub fn has_color_at(&self, v: Vertex, c: Color) -> bool {
        self.nbr[v * (self.colors + 1) + c] != NONE
    }

    pub fn palette(&self, v: Vertex) -> impl Iterator<Item = Color> + '_ {
        (1..=self.colors).filter(move |&c| self.has_color_at(v, c))
    }

    pub fn class(&self, c: Color) -> &BTreeSet<EdgeId> {
        &self.class[c]
    }

    pub fn assigned(&self) -> usize {
        self.assigned
    }

    pub fn is_total(&self) -> bool {
        self.assigned == self.graph.edge_count()
    }

    pub fn colored_edges(&self) -> impl Iterator<Item = (EdgeId, Color)> + '_ {
        self.color
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (EdgeId(i), c as Color))
    }

    /// Colors `e` with `c`, keeping the coloring proper.
    pub fn set(&mut self, e: EdgeId, c: Color) -> Result<(), ModelError> {
        if c == 0 || c > self.colors {
            return Err(ModelError::ColorOutOfRange { color: c, max: self.colors });
        }
        if !self.graph.contains(e) {
            return Err(ModelError::InvalidEdge(e.0));
        }
        let (u, v) = self.graph.endpoints(e);
        let old = self.raw(e);
        if old == c {
            return Ok(());
        }
        for w in [u, v] {
            if let Some(x) = self.edge_at(w, c) {
                if x != e {
                    return Err(ModelError::Improper { vertex: w, color: c });
                }
            }
        }
        self.clear(e);
        self.put(e, u, v, c);
        Ok(())
    }

    pub fn clear(&mut self, e: EdgeId) -> Option<Color> {
        let old = self.get(e)?;
        let (u, v) = self.graph.endpoints(e);
        let k = self.colors + 1;
        self.nbr[u * k + old] = NONE;
        self.nbr[v * k + old] = NONE;
        self.class[old].remove(&e);
        self.color[e.0] = 0;
        self.assigned -= 1;
        Some(old)
    }

    #[inline]
    fn put(&mut self, e: EdgeId, u: Vertex, v: Vertex, c: Color) {
        let k = self.colors + 1;
        self.nbr[u * k + c] = v as u32;
        self.nbr[v * k + c] = u as u32;
        self.class[c].insert(e);
        self.color[e.0] = c as u16;
        self.assigned += 1;
    }

    /// Checks that the 4 edges of `cycle` alternate two colors and returns them.
    pub fn two_colors(&self, cycle: &[Vertex; 4]) -> Option<(Color, Color)> {
        let [a, b, c, d] = *cycle;
        if a == b || a == c || a == d || b == c || b == d || c == d {
            return None;
        }
        let c1 = self.raw(EdgeId::of(a, b));
        let c2 = self.raw(EdgeId::of(b, c));
        if c1 == 0 || c2 == 0 || c1 == c2 {
            return None;
        }
        if self.raw(EdgeId::of(c, d)) != c1 || self.raw(EdgeId::of(d, a)) != c2 {
            return None;
        }
        Some((c1, c2))
    }

    /// Exchanges the two colors around a 2-colored 4-cycle `a b c d`.
    /// Applying the same swap twice restores the coloring.
    pub fn apply_swap(&mut self, cycle: &[Vertex; 4]) -> Result<(Color, Color), ModelError> {
        let (c1, c2) = self
            .two_colors(cycle)
            .ok_or(ModelError::NotTwoColored(*cycle))?;
        self.swap_unchecked(cycle, c1, c2);
        Ok((c1, c2))
    }

    /// Undoes `apply_swap`; a swap is its own inverse.
    pub fn revert_swap(&mut self, cycle: &[Vertex; 4]) -> Result<(Color, Color), ModelError> {
        self.apply_swap(cycle)
    }

    #[inline]
    pub(crate) fn swap_unchecked(&mut self, cycle: &[Vertex; 4], c1: Color, c2: Color) {
        let [a, b, c, d] = *cycle;
        let k = self.colors + 1;
        let ab = EdgeId::of(a, b);
        let bc = EdgeId::of(b, c);
        let cd = EdgeId::of(c, d);
        let da = EdgeId::of(d, a);
        // Every vertex of the cycle sees both colors, one of each edge;
        // the vertex table swaps its two entries.
        for v in [a, b, c, d] {
            self.nbr.swap(v * k + c1, v * k + c2);
        }
        for e in [ab, cd] {
            self.class[c1].remove(&e);
            self.class[c2].insert(e);
            self.color[e.0] = c2 as u16;
        }
        for e in [bc, da] {
            self.class[c2].remove(&e);
            self.class[c1].insert(e);
            self.color[e.0] = c1 as u16;
        }
    }

    /// Full rebuild comparison of the indices against the assignment.
    pub fn check_consistency(&self) -> Result<(), String> {
        let k = self.colors + 1;
        let mut nbr = vec![NONE; self.graph.order() * k];
        let mut class = vec![BTreeSet::new(); k];
        let mut assigned = 0;
        for (e, c) in self.colored_edges() {
            let (u, v) = self.graph.endpoints(e);
            if nbr[u * k + c] != NONE || nbr[v * k + c] != NONE {
                return Err(format!("color {c} repeated at an endpoint of {e}"));
            }
            nbr[u * k + c] = v as u32;
            nbr[v * k + c] = u as u32;
            class[c].insert(e);
            assigned += 1;
        }
        if nbr != self.nbr {
            return Err("vertex palette index out of sync".into());
        }
        if class != self.class {
            return Err("color class index out of sync".into());
        }
        if assigned != self.assigned {
            return Err("assigned counter out of sync".into());
        }
        Ok(())
    }
}

/// Per-edge sets of forbidden colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListAssignment {
    graph: CompleteGraph,
    colors: usize,
    lists: Vec<Vec<Color>>,
    count: Vec<u32>,
}

impl ListAssignment {
    pub fn new(graph: CompleteGraph, colors: usize) -> ListAssignment {
        ListAssignment {
            lists: vec![Vec::new(); graph.edge_count()],
            count: vec![0; graph.order() * (colors + 1)],
            graph,
            colors,
        }
    }

    pub fn for_index(index: &CompleteGraphIndex) -> ListAssignment {
        ListAssignment::new(index.graph().clone(), index.m())
    }

    pub fn graph(&self) -> &CompleteGraph {
        &self.graph
    }

    pub fn num_colors(&self) -> usize {
        self.colors
    }

    /// Sorted list of `e`.
    #[inline]
    pub fn list(&self, e: EdgeId) -> &[Color] {
        &self.lists[e.0]
    }

    #[inline]
    pub fn contains(&self, e: EdgeId, c: Color) -> bool {
        self.lists[e.0].binary_search(&c).is_ok()
    }

    /// Number of edges at `v` whose list holds `c`.
    #[inline]
    pub fn count_at(&self, v: Vertex, c: Color) -> usize {
        self.count[v * (self.colors + 1) + c] as usize
    }

    pub fn insert(&mut self, e: EdgeId, c: Color) -> Result<bool, ModelError> {
        if c == 0 || c > self.colors {
            return Err(ModelError::ColorOutOfRange { color: c, max: self.colors });
        }
        if !self.graph.contains(e) {
            return Err(ModelError::InvalidEdge(e.0));
        }
        let list = &mut self.lists[e.0];
        match list.binary_search(&c) {
            Ok(_) => Ok(false),
            Err(pos) => {
                list.insert(pos, c);
                let (u, v) = self.graph.endpoints(e);
                let k = self.colors + 1;
                self.count[u * k + c] += 1;
                self.count[v * k + c] += 1;
                Ok(true)
            }
        }
    }

    pub fn remove(&mut self, e: EdgeId, c: Color) -> bool {
        let list = &mut self.lists[e.0];
        match list.binary_search(&c) {
            Ok(pos) => {
                list.remove(pos);
                let (u, v) = self.graph.endpoints(e);
                let k = self.colors + 1;
                self.count[u * k + c] -= 1;
                self.count[v * k + c] -= 1;
                true
            }
            Err(_) => false,
        }
    }

    pub fn nonempty(&self) -> impl Iterator<Item = (EdgeId, &[Color])> + '_ {
        self.lists
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(i, l)| (EdgeId(i), l.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.lists.iter().all(|l| l.is_empty())
    }

    pub fn check_consistency(&self) -> Result<(), String> {
        let k = self.colors + 1;
        let mut count = vec![0u32; self.graph.order() * k];
        for (e, l) in self.nonempty() {
            if l.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("list of {e} not strictly sorted"));
            }
            let (u, v) = self.graph.endpoints(e);
            for &c in l {
                if c == 0 || c > self.colors {
                    return Err(format!("list of {e} holds color {c} out of range"));
                }
                count[u * k + c] += 1;
                count[v * k + c] += 1;
            }
        }
        if count != self.count {
            return Err("per-vertex list counts out of sync".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Paper,
    Relaxed,
}

/// Which of the two H(n) expressions to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HFormula {
    /// 7αm + 7f(n) + 6c(n) + 4dn
    Correction,
    /// 9αm + 9f(n) + 6c(n) + 4dn
    Preamble,
}

/// Constants and threshold functions, evaluated for one `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterSet {
    pub preset: Preset,
    pub n: usize,
    pub m: usize,
    pub alpha: Ratio<i64>,
    pub beta: Ratio<i64>,
    pub d: Ratio<i64>,
    pub epsilon: Ratio<i64>,
    pub k: Ratio<i64>,
    pub c_n: usize,
    pub cprime_n: usize,
    pub f_n: usize,
    pub h_formula: HFormula,
    pub h_n: usize,
    pub p_n: usize,
    /// Treat counting-only selection filters (e.g. "undisturbed") as hard.
    pub strict_selection: bool,
}

pub fn floor_mul(x: Ratio<i64>, k: usize) -> usize {
    let v = (x * Ratio::from_integer(k as i64)).floor().to_integer();
    v.max(0) as usize
}

impl ParameterSet {
    /// The asymptotic constants: α=β=10⁻⁶, d=1/200, ε=1/50000, k=1/5000,
    /// c(n)=⌊n/50000⌋, f(n)=⌊n/10000⌋.
    pub fn paper(n: usize) -> ParameterSet {
        let r = Ratio::new;
        ParameterSet::build(
            Preset::Paper,
            n,
            [r(1, 1_000_000), r(1, 1_000_000), r(1, 200), r(1, 50_000), r(1, 5_000)],
            n / 50_000,
            n / 10_000,
            HFormula::Correction,
        )
    }

    /// Desk-scale values. Every threshold has to be at least 1 at small n or
    /// the corresponding machinery can never act:
    ///
    /// * α = β = 1/5 (admits a handful of precolored edges and unit lists),
    /// * d = 1, so a color is only d-overloaded once its whole class is disturbed,
    /// * ε = 1/3, k = 8 (the odd-order K_{n,n} pattern keeps at most 3n+7
    ///   edges below floor(n/2) - floor(n/3) strong cycles for n up to 31),
    /// * c(n) = max(4, ⌈n/2⌉), f(n) = max(2, ⌈n/2⌉).
    pub fn relaxed(n: usize) -> ParameterSet {
        let r = Ratio::new;
        ParameterSet::build(
            Preset::Relaxed,
            n,
            [r(1, 5), r(1, 5), r(1, 1), r(1, 3), r(8, 1)],
            n.div_ceil(2).max(4),
            n.div_ceil(2).max(2),
            HFormula::Correction,
        )
    }

    pub fn for_preset(preset: Preset, n: usize) -> ParameterSet {
        match preset {
            Preset::Paper => ParameterSet::paper(n),
            Preset::Relaxed => ParameterSet::relaxed(n),
        }
    }

    /// `[alpha, beta, d, epsilon, k]`.
    pub fn build(
        preset: Preset,
        n: usize,
        consts: [Ratio<i64>; 5],
        c_n: usize,
        f_n: usize,
        h_formula: HFormula,
    ) -> ParameterSet {
        let [alpha, beta, d, epsilon, k] = consts;
        let mut p = ParameterSet {
            preset,
            n,
            m: color_count(n.max(1)),
            alpha,
            beta,
            d,
            epsilon,
            k,
            c_n,
            cprime_n: c_n / 2,
            f_n,
            h_formula,
            h_n: 0,
            p_n: 0,
            strict_selection: preset == Preset::Paper,
        };
        p.recompute();
        p
    }

    pub fn with_h_formula(mut self, h: HFormula) -> ParameterSet {
        self.h_formula = h;
        self.recompute();
        self
    }

    pub fn with_alpha_beta(mut self, alpha: Ratio<i64>, beta: Ratio<i64>) -> ParameterSet {
        self.alpha = alpha;
        self.beta = beta;
        self.recompute();
        self
    }

    fn recompute(&mut self) {
        let n = Ratio::from_integer(self.n as i64);
        let m = Ratio::from_integer(self.m as i64);
        let f = Ratio::from_integer(self.f_n as i64);
        let c = Ratio::from_integer(self.c_n as i64);
        let am = self.alpha * m;
        let dn = self.d * n;
        self.p_n = (dn + am + f).ceil().to_integer() as usize;
        let h = match self.h_formula {
            HFormula::Correction => am * 7 + f * 7 + c * 6 + dn * 4,
            HFormula::Preamble => am * 9 + f * 9 + c * 6 + dn * 4,
        };
        self.h_n = h.ceil().to_integer() as usize;
    }

    pub fn alpha_m(&self) -> usize {
        floor_mul(self.alpha, self.m)
    }

    pub fn beta_m(&self) -> usize {
        floor_mul(self.beta, self.m)
    }

    pub fn d_n(&self) -> usize {
        floor_mul(self.d, self.n)
    }

    pub fn epsilon_n(&self) -> usize {
        floor_mul(self.epsilon, self.n)
    }

    pub fn k_n2(&self) -> usize {
        floor_mul(self.k, self.n * self.n)
    }

    /// Minimum number of allowed strong cycles per K_{n,n} edge in (a).
    pub fn strong_threshold(&self) -> usize {
        (self.n / 2).saturating_sub(self.epsilon_n())
    }

    /// Number of edges allowed below the threshold in (a).
    pub fn deficiency_allowance(&self) -> usize {
        3 * self.n + 7
    }

    /// Upper bound on the number of corrections, 2n(αm + c(n)).
    pub fn correction_bound(&self) -> usize {
        2 * self.n * (self.alpha_m() + self.c_n)
    }
}
