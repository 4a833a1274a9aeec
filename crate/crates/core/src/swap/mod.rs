//! Swaps on 2-colored 4-cycles, the disturbed-edge ledger, and the
//! composite recoloring operations built on them.

mod exchange;
mod moves;

use std::fmt;

use thiserror::Error;

use crate::error::ModelError;
use crate::model::{Color, CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet, Part, Vertex};

pub use exchange::EXCHANGE_BUDGET;
pub use moves::{PLACE_BUDGET, PULL_BUDGET, PULL_HIGH_BUDGET, PUSH_BUDGET};

/// Does swapping the 2-colored 4-cycle create no conflict edge?
pub fn is_allowed_cycle(h: &EdgeColoring, cycle: &[Vertex; 4], lists: &ListAssignment) -> bool {
    match h.two_colors(cycle) {
        Some((c1, c2)) => allowed_with(cycle, c1, c2, lists),
        None => false,
    }
}

/// Like [`is_allowed_cycle`], but reports cycles that are not 2-colored.
pub fn check_allowed_cycle(h: &EdgeColoring, cycle: &[Vertex; 4], lists: &ListAssignment) -> Result<bool, ModelError> {
    let (c1, c2) = h.two_colors(cycle).ok_or(ModelError::NotTwoColored(*cycle))?;
    Ok(allowed_with(cycle, c1, c2, lists))
}

#[inline]
fn allowed_with(cycle: &[Vertex; 4], c1: Color, c2: Color, lists: &ListAssignment) -> bool {
    let [a, b, c, d] = *cycle;
    // ab and cd take c2, bc and da take c1.
    !lists.contains(EdgeId::of(a, b), c2)
        && !lists.contains(EdgeId::of(c, d), c2)
        && !lists.contains(EdgeId::of(b, c), c1)
        && !lists.contains(EdgeId::of(d, a), c1)
}

#[inline]
pub fn cycle_edges(cycle: &[Vertex; 4]) -> [EdgeId; 4] {
    let [a, b, c, d] = *cycle;
    [EdgeId::of(a, b), EdgeId::of(b, c), EdgeId::of(c, d), EdgeId::of(d, a)]
}

/// One performed swap; `colors.0` was on `cycle[0]cycle[1]` before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwapRecord {
    pub cycle: [Vertex; 4],
    pub colors: (Color, Color),
}

impl SwapRecord {
    /// The four edges with the colors they had before this swap.
    pub fn edges_before(&self) -> [(EdgeId, Color); 4] {
        let e = cycle_edges(&self.cycle);
        let (c1, c2) = self.colors;
        [(e[0], c1), (e[1], c2), (e[2], c1), (e[3], c2)]
    }
}

/// Ordered swap log with the disturbed-edge accounting.
///
/// An edge is disturbed once it appears in a logged swap, or if it belongs
/// to the baseline set. Per-color counts are taken under the current
/// coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapTrace {
    records: Vec<SwapRecord>,
    touches: Vec<u32>,
    baseline: Vec<bool>,
    baseline_len: usize,
    disturbed: usize,
    touched: usize,
    by_color: Vec<usize>,
    by_vertex: Vec<usize>,
}

impl SwapTrace {
    pub fn new(h: &EdgeColoring, baseline: &[EdgeId]) -> SwapTrace {
        let g = h.graph();
        let mut t = SwapTrace {
            records: Vec::new(),
            touches: vec![0; g.edge_count()],
            baseline: vec![false; g.edge_count()],
            baseline_len: 0,
            disturbed: 0,
            touched: 0,
            by_color: vec![0; h.num_colors() + 1],
            by_vertex: vec![0; g.order()],
        };
        for &e in baseline {
            if !t.baseline[e.0] {
                t.baseline[e.0] = true;
                t.baseline_len += 1;
                t.disturbed += 1;
                t.by_color[h.raw(e)] += 1;
                let (u, v) = g.endpoints(e);
                t.by_vertex[u] += 1;
                t.by_vertex[v] += 1;
            }
        }
        t
    }

    pub fn records(&self) -> &[SwapRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[inline]
    pub fn is_disturbed(&self, e: EdgeId) -> bool {
        self.touches[e.0] > 0 || self.baseline[e.0]
    }

    pub fn is_baseline(&self, e: EdgeId) -> bool {
        self.baseline[e.0]
    }

    pub fn baseline_len(&self) -> usize {
        self.baseline_len
    }

    /// Size of the disturbed set (swap participants plus baseline).
    pub fn disturbed_count(&self) -> usize {
        self.disturbed
    }

    /// Edges that took part in at least one logged swap.
    pub fn swapped_edge_count(&self) -> usize {
        self.touched
    }

    #[inline]
    pub fn disturbed_by_color(&self, c: Color) -> usize {
        self.by_color[c]
    }

    #[inline]
    pub fn disturbed_by_vertex(&self, v: Vertex) -> usize {
        self.by_vertex[v]
    }

    fn push(&mut self, g: &crate::model::CompleteGraph, rec: SwapRecord) {
        for (e, old) in rec.edges_before() {
            let new = if old == rec.colors.0 { rec.colors.1 } else { rec.colors.0 };
            if self.touches[e.0] == 0 {
                self.touched += 1;
            }
            if self.is_disturbed(e) {
                self.by_color[old] -= 1;
            } else {
                self.disturbed += 1;
                let (u, v) = g.endpoints(e);
                self.by_vertex[u] += 1;
                self.by_vertex[v] += 1;
            }
            self.by_color[new] += 1;
            self.touches[e.0] += 1;
        }
        self.records.push(rec);
    }

    fn pop(&mut self, g: &crate::model::CompleteGraph) -> Option<SwapRecord> {
        let rec = self.records.pop()?;
        for (e, old) in rec.edges_before() {
            let new = if old == rec.colors.0 { rec.colors.1 } else { rec.colors.0 };
            self.touches[e.0] -= 1;
            if self.touches[e.0] == 0 {
                self.touched -= 1;
            }
            self.by_color[new] -= 1;
            if self.is_disturbed(e) {
                self.by_color[old] += 1;
            } else {
                self.disturbed -= 1;
                let (u, v) = g.endpoints(e);
                self.by_vertex[u] -= 1;
                self.by_vertex[v] -= 1;
            }
        }
        Some(rec)
    }

    /// Recomputes every counter from the log and `h` (the current coloring)
    /// and compares with the incremental values.
    pub fn recount(&self, h: &EdgeColoring) -> Result<(), String> {
        let g = h.graph();
        let mut touches = vec![0u32; g.edge_count()];
        for r in &self.records {
            for e in cycle_edges(&r.cycle) {
                touches[e.0] += 1;
            }
        }
        if touches != self.touches {
            return Err("per-edge swap counts disagree with the log".into());
        }
        let mut by_color = vec![0usize; h.num_colors() + 1];
        let mut by_vertex = vec![0usize; g.order()];
        let mut disturbed = 0;
        let mut touched = 0;
        for e in g.edges() {
            if touches[e.0] > 0 {
                touched += 1;
            }
            if touches[e.0] > 0 || self.baseline[e.0] {
                disturbed += 1;
                by_color[h.raw(e)] += 1;
                let (u, v) = g.endpoints(e);
                by_vertex[u] += 1;
                by_vertex[v] += 1;
            }
        }
        if disturbed != self.disturbed || touched != self.touched {
            return Err(format!(
                "disturbed {} / swapped {} recounted as {disturbed} / {touched}",
                self.disturbed, self.touched
            ));
        }
        if by_color != self.by_color {
            return Err("per-color disturbed counts disagree with a recount".into());
        }
        if by_vertex != self.by_vertex {
            return Err("per-vertex disturbed counts disagree with a recount".into());
        }
        Ok(())
    }
}

/// Constraints a composite operation runs under, on top of its own
/// operation-specific rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SwapRequest {
    /// Edges colored with one of these (when the operation starts) must not
    /// take part in any swap.
    pub avoided: Vec<Color>,
    /// Edges the operation must not touch at all (anchors of an enclosing
    /// operation).
    pub protected: Vec<EdgeId>,
    /// Prescribed edges the operation may recolor.
    pub allowed_prescribed: Vec<EdgeId>,
}

impl SwapRequest {
    pub fn avoiding(colors: &[Color]) -> SwapRequest {
        SwapRequest {
            avoided: colors.to_vec(),
            ..SwapRequest::default()
        }
    }

    pub fn avoids(&self, c: Color) -> bool {
        self.avoided.contains(&c)
    }

    pub fn protects(&self, e: EdgeId) -> bool {
        self.protected.contains(&e)
    }

    pub fn may_recolor_prescribed(&self, e: EdgeId) -> bool {
        self.allowed_prescribed.contains(&e)
    }

    /// Request for a sub-operation: one avoided color lifted, extra
    /// protected edges, and its own prescribed allowance.
    pub(crate) fn nested(&self, lift: Option<Color>, protect: &[EdgeId], prescribed: &[EdgeId]) -> SwapRequest {
        let mut r = SwapRequest {
            avoided: self.avoided.clone(),
            protected: self.protected.clone(),
            allowed_prescribed: prescribed.to_vec(),
        };
        if let Some(c) = lift {
            r.avoided.retain(|&a| a != c);
        }
        for &e in protect {
            if !r.protected.contains(&e) {
                r.protected.push(e);
            }
        }
        r
    }
}

/// Search limits for the operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Swaps before the final one in an exchange.
    pub exchange_depth: usize,
    /// Search nodes per exchange call.
    pub exchange_nodes: usize,
    /// Candidates tried per selection stage of a composite operation.
    pub candidates: usize,
    /// Treat counting-only filters ("not disturbed") as hard rules rather
    /// than a preference order.
    pub strict_selection: bool,
}

impl SearchConfig {
    pub fn for_params(params: &ParameterSet) -> SearchConfig {
        SearchConfig {
            exchange_depth: 3,
            exchange_nodes: 3_000,
            candidates: 6,
            strict_selection: params.strict_selection,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExclusionTally {
    pub reasons: Vec<(&'static str, usize)>,
}

impl ExclusionTally {
    pub fn bump(&mut self, reason: &'static str) {
        match self.reasons.iter_mut().find(|r| r.0 == reason) {
            Some(r) => r.1 += 1,
            None => self.reasons.push((reason, 1)),
        }
    }

    pub fn total(&self) -> usize {
        self.reasons.iter().map(|r| r.1).sum()
    }
}

impl fmt::Display for ExclusionTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.reasons.iter().map(|(r, k)| format!("{r}={k}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SwapError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("swap on {0:?} would create a conflict edge")]
    Disallowed([Vertex; 4]),
    #[error("{op}: precondition failed: {reason}")]
    Precondition { op: &'static str, reason: String },
    #[error("{op}: no admissible candidate at stage `{stage}` ({tally})")]
    NoCandidate {
        op: &'static str,
        stage: &'static str,
        tally: ExclusionTally,
    },
    #[error("{op}: postcondition violated: {reason}")]
    Contract { op: &'static str, reason: String },
}

impl SwapError {
    /// Short label for exclusion tallies.
    pub fn reason(&self) -> &'static str {
        match self {
            SwapError::Model(_) => "model",
            SwapError::Disallowed(_) => "disallowed",
            SwapError::Precondition { op, .. } | SwapError::NoCandidate { op, .. } => op,
            SwapError::Contract { .. } => "contract",
        }
    }

    pub(crate) fn pre(op: &'static str, reason: impl Into<String>) -> SwapError {
        SwapError::Precondition { op, reason: reason.into() }
    }
}

/// Result of a successful composite operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpOutcome {
    pub swaps: usize,
    /// Distinct edges that took part in a swap of this operation.
    pub touched: usize,
    /// Distinct edges whose color differs afterwards.
    pub changed: usize,
}

/// Summary of the swaps logged since a checkpoint.
#[derive(Clone, Debug, Default)]
pub struct TouchSummary {
    /// `(edge, color when the checkpoint was taken)` in first-touch order.
    pub edges: Vec<(EdgeId, Color)>,
    pub swaps: usize,
}

impl TouchSummary {
    pub fn outcome(&self, h: &EdgeColoring) -> OpOutcome {
        OpOutcome {
            swaps: self.swaps,
            touched: self.edges.len(),
            changed: self.edges.iter().filter(|&&(e, c)| h.raw(e) != c).count(),
        }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.iter().any(|x| x.0 == e)
    }

    pub fn count_colored(&self, c: Color) -> usize {
        self.edges.iter().filter(|x| x.1 == c).count()
    }
}

/// Postconditions shared by every composite operation, checked after the
/// fact against the swaps logged since the operation began.
#[derive(Clone, Debug)]
pub(crate) struct Contract<'r> {
    pub op: &'static str,
    pub budget: usize,
    pub req: &'r SwapRequest,
    /// Colors exempt from the overload rule.
    pub exempt: Vec<Color>,
    pub knn_only: bool,
    /// Overload status of each color when the operation began.
    pub overloaded: Vec<bool>,
}

/// Owns the working coloring h″ and its trace, and runs swaps and the
/// composite operations transactionally: every failed operation leaves the
/// coloring and trace exactly as they were.
#[derive(Clone, Debug)]
pub struct SwapEngine<'a> {
    index: &'a CompleteGraphIndex,
    lists: &'a ListAssignment,
    prescribed: &'a EdgeColoring,
    params: &'a ParameterSet,
    config: SearchConfig,
    h: EdgeColoring,
    trace: SwapTrace,
    mark: Vec<u32>,
    epoch: u32,
    pub stats: EngineStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub exchange_calls: usize,
    pub exchange_nodes: usize,
    pub rollbacks: usize,
}

impl<'a> SwapEngine<'a> {
    pub fn new(
        index: &'a CompleteGraphIndex,
        h: EdgeColoring,
        lists: &'a ListAssignment,
        prescribed: &'a EdgeColoring,
        params: &'a ParameterSet,
        baseline: &[EdgeId],
    ) -> SwapEngine<'a> {
        let trace = SwapTrace::new(&h, baseline);
        SwapEngine {
            index,
            lists,
            prescribed,
            params,
            config: SearchConfig::for_params(params),
            mark: vec![0; h.graph().edge_count()],
            epoch: 0,
            h,
            trace,
            stats: EngineStats::default(),
        }
    }

    pub fn with_config(mut self, config: SearchConfig) -> Self {
        self.config = config;
        self
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn index(&self) -> &'a CompleteGraphIndex {
        self.index
    }

    pub fn lists(&self) -> &'a ListAssignment {
        self.lists
    }

    pub fn prescribed(&self) -> &'a EdgeColoring {
        self.prescribed
    }

    pub fn params(&self) -> &'a ParameterSet {
        self.params
    }

    pub fn coloring(&self) -> &EdgeColoring {
        &self.h
    }

    pub fn trace(&self) -> &SwapTrace {
        &self.trace
    }

    pub fn into_parts(self) -> (EdgeColoring, SwapTrace) {
        (self.h, self.trace)
    }

    #[inline]
    pub fn color(&self, e: EdgeId) -> Color {
        self.h.raw(e)
    }

    #[inline]
    pub fn is_prescribed(&self, e: EdgeId) -> bool {
        self.prescribed.is_colored(e)
    }

    #[inline]
    pub fn is_conflict(&self, e: EdgeId) -> bool {
        self.lists.contains(e, self.h.raw(e))
    }

    pub fn dn(&self) -> usize {
        self.params.d_n()
    }

    #[inline]
    pub fn color_overloaded(&self, c: Color) -> bool {
        self.trace.disturbed_by_color(c) >= self.dn()
    }

    #[inline]
    pub fn vertex_overloaded(&self, v: Vertex) -> bool {
        self.trace.disturbed_by_vertex(v) >= self.dn()
    }

    pub fn overload_snapshot(&self) -> Vec<bool> {
        (0..=self.index.m()).map(|c| c > 0 && self.color_overloaded(c)).collect()
    }

    /// Would edge `e` colored `c` be requested: some other edge at an
    /// endpoint is prescribed `c`.
    #[inline]
    pub fn requested_with(&self, e: EdgeId, c: Color) -> bool {
        let (u, v) = self.index.endpoints(e);
        [u, v]
            .into_iter()
            .any(|w| self.prescribed.edge_at(w, c).is_some_and(|f| f != e))
    }

    pub fn is_requested(&self, e: EdgeId) -> bool {
        self.requested_with(e, self.h.raw(e))
    }

    /// Performs an allowed swap and logs it.
    pub fn swap(&mut self, cycle: &[Vertex; 4]) -> Result<(Color, Color), SwapError> {
        let (c1, c2) = self.h.two_colors(cycle).ok_or(ModelError::NotTwoColored(*cycle))?;
        if !allowed_with(cycle, c1, c2, self.lists) {
            return Err(SwapError::Disallowed(*cycle));
        }
        self.h.swap_unchecked(cycle, c1, c2);
        self.trace.push(
            self.index.graph(),
            SwapRecord {
                cycle: *cycle,
                colors: (c1, c2),
            },
        );
        Ok((c1, c2))
    }

    #[inline]
    pub fn checkpoint(&self) -> usize {
        self.trace.len()
    }

    /// Undoes logged swaps back to `cp`.
    pub fn rollback(&mut self, cp: usize) {
        if self.trace.len() > cp {
            self.stats.rollbacks += 1;
        }
        while self.trace.len() > cp {
            let rec = self.trace.pop(self.index.graph()).expect("log longer than checkpoint");
            let (c1, c2) = rec.colors;
            // After the swap the first edge holds c2.
            self.h.swap_unchecked(&rec.cycle, c2, c1);
        }
    }

    /// Edges swapped since `cp`, with their colors at `cp`.
    pub fn touched_since(&mut self, cp: usize) -> TouchSummary {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let mut out = TouchSummary {
            edges: Vec::new(),
            swaps: self.trace.len() - cp,
        };
        for rec in &self.trace.records[cp..] {
            for (e, c) in rec.edges_before() {
                if self.mark[e.0] != self.epoch {
                    self.mark[e.0] = self.epoch;
                    out.edges.push((e, c));
                }
            }
        }
        out
    }

    pub(crate) fn contract<'r>(&self, op: &'static str, budget: usize, req: &'r SwapRequest) -> Contract<'r> {
        Contract {
            op,
            budget,
            req,
            exempt: Vec::new(),
            knn_only: false,
            overloaded: self.overload_snapshot(),
        }
    }

    /// Checks the shared postconditions of the swaps since `cp`.
    pub(crate) fn verify(&mut self, cp: usize, c: &Contract<'_>) -> Result<TouchSummary, SwapError> {
        let t = self.touched_since(cp);
        let fail = |reason: String| Err(SwapError::Contract { op: c.op, reason });
        if t.edges.len() > c.budget {
            return fail(format!("{} edges swapped, budget {}", t.edges.len(), c.budget));
        }
        for &(e, orig) in &t.edges {
            if c.knn_only && !self.index.is_knn(e) {
                return fail(format!("{e} outside K_{{n,n}}"));
            }
            if c.req.protects(e) {
                return fail(format!("protected {e} swapped"));
            }
            if c.req.avoids(orig) {
                return fail(format!("{e} carried avoided color {orig}"));
            }
            if c.overloaded[orig] && !c.exempt.contains(&orig) {
                return fail(format!("{e} carried overloaded color {orig}"));
            }
            if self.is_prescribed(e) && !c.req.may_recolor_prescribed(e) {
                return fail(format!("prescribed {e} swapped"));
            }
            let now = self.h.raw(e);
            if now != orig {
                if self.lists.contains(e, now) && !self.lists.contains(e, orig) {
                    return fail(format!("new conflict on {e}"));
                }
                if self.index.part(e) != Part::Knn && self.requested_with(e, now) && !self.requested_with(e, orig) {
                    return fail(format!("new requested clique edge {e}"));
                }
            }
        }
        Ok(t)
    }

    /// Full consistency check of coloring indices and trace counters.
    pub fn self_check(&self) -> Result<(), String> {
        self.h.check_consistency()?;
        self.trace.recount(&self.h)
    }
}
