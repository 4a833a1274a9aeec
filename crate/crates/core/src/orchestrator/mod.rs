//! The full pipeline: standard coloring, relabeling, conflict absorption and
//! the correction loop, plus an independent checker for final colorings.

mod correct;

use std::fmt;

use thiserror::Error;

pub use correct::{Case, Correction};

use crate::error::ModelError;
use crate::exec::Strategy;
use crate::extend::{extend_to_phi_prime, ExtendError};
use crate::model::{Color, CompleteGraph, CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet, Part, Preset, Vertex};
use crate::oracle::{oracle_solve_with, Instance, OracleConfig, OracleOutcome};
use crate::permute::{sample_good_relabeling_from, Relabeling, RelabelError, Sampled, DEFAULT_MAX_TRIES};
use crate::standard::standard_coloring;
use crate::swap::{SearchConfig, SwapEngine, SwapError, SwapTrace};

pub const DEFAULT_RESTARTS: usize = 20;

/// Correction phases, processed in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// K_{n,n} edges prescribed a K_{n,n} color.
    KnnLow,
    /// K_{n,n} edges prescribed a clique color.
    KnnHigh,
    /// Clique edges.
    Clique,
}

impl Phase {
    pub fn of(index: &CompleteGraphIndex, e: EdgeId, c: Color) -> Phase {
        match index.part(e) {
            Part::Knn if index.is_low(c) => Phase::KnnLow,
            Part::Knn => Phase::KnnHigh,
            _ => Phase::Clique,
        }
    }

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub seed: u64,
    pub max_tries: usize,
    pub strategy: Strategy,
    /// Overrides the search limits derived from the parameters.
    pub search: Option<SearchConfig>,
    /// Hand instances of at most this order to the exact solver when the
    /// pipeline fails.
    pub oracle_fallback: Option<usize>,
    /// Further relabelings tried after absorption or correction fails.
    pub restarts: usize,
    /// Correction attempts allowed per initially mis-colored edge.
    pub retry_factor: usize,
    /// Run the full coloring and trace consistency check after every
    /// correction.
    pub self_check: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            max_tries: DEFAULT_MAX_TRIES,
            strategy: Strategy::default(),
            search: None,
            oracle_fallback: None,
            restarts: DEFAULT_RESTARTS,
            retry_factor: 10,
            self_check: false,
        }
    }
}

impl SolveConfig {
    pub fn seeded(seed: u64) -> SolveConfig {
        SolveConfig {
            seed,
            ..SolveConfig::default()
        }
    }
}

/// One correction as it happened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionStep {
    pub edge: EdgeId,
    pub phase: Phase,
    pub case: Case,
    pub swaps: usize,
    pub touched: usize,
    pub recolored_prescribed: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub n: usize,
    /// Relabelings drawn, counting the accepted one.
    pub tries: usize,
    /// Accepted relabelings given up on after a failed absorption or
    /// correction.
    pub restarts: usize,
    /// Conflict edges newly prescribed.
    pub absorbed: usize,
    /// Prescribed edges mis-colored before correction (q).
    pub queue_len: usize,
    pub corrections: Vec<CorrectionStep>,
    pub corrections_by_case: [usize; 4],
    pub swaps_by_phase: [usize; 3],
    /// Failed correction attempts that were retried later.
    pub deferrals: usize,
    pub swaps: usize,
    /// Fixed exceptional edges counted as disturbed from the start.
    pub baseline: usize,
    pub disturbed: usize,
    /// Distinct edges touched by a swap.
    pub swapped_edges: usize,
    pub max_color_disturbed: usize,
    pub h_n: usize,
    pub k_n2: usize,
    pub correction_bound: usize,
    /// Bound checks that failed under the relaxed preset.
    pub warnings: Vec<String>,
}

impl SolveStats {
    fn record(&mut self, step: CorrectionStep) {
        self.corrections_by_case[step.case as usize] += 1;
        self.swaps_by_phase[step.phase as usize] += step.swaps;
        self.swaps += step.swaps;
        self.corrections.push(step);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Pipeline,
    Oracle,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Total coloring of the instance graph.
    pub coloring: EdgeColoring,
    /// Pipeline intermediates, on K_{2n} (also for odd orders).
    pub hprime: Option<EdgeColoring>,
    pub phi_prime: Option<EdgeColoring>,
    pub rho: Option<Relabeling>,
    pub trace: Option<SwapTrace>,
    pub stats: SolveStats,
    pub source: Source,
}

#[derive(Clone, Debug, Error)]
pub enum SolveError {
    #[error("invalid instance: {0}")]
    Invalid(#[from] ModelError),
    #[error("relabeling: {0}")]
    Relabel(#[from] RelabelError),
    #[error("conflict absorption: {0}")]
    Extend(#[from] ExtendError),
    #[error("correcting {edge} in phase {}: {error}", phase.number())]
    Correction {
        edge: EdgeId,
        phase: Phase,
        error: SwapError,
        stats: Box<SolveStats>,
    },
    #[error("gave up after {limit} correction attempts")]
    Retries { limit: usize, stats: Box<SolveStats> },
    #[error("bound violated: {what}")]
    Bound { what: String, stats: Box<SolveStats> },
    #[error("final coloring fails verification: {0}")]
    Verify(VerifyReport),
}

impl SolveError {
    pub fn stage(&self) -> &'static str {
        match self {
            SolveError::Invalid(_) => "invalid",
            SolveError::Relabel(_) => "relabel",
            SolveError::Extend(_) => "extend",
            SolveError::Correction { .. } | SolveError::Retries { .. } => "correct",
            SolveError::Bound { .. } => "bound",
            SolveError::Verify(_) => "verify",
        }
    }

    pub fn stats(&self) -> Option<&SolveStats> {
        match self {
            SolveError::Correction { stats, .. } | SolveError::Retries { stats, .. } | SolveError::Bound { stats, .. } => Some(stats),
            _ => None,
        }
    }
}

/// Prescribed edges whose current color differs, in processing order.
pub fn miscolored(index: &CompleteGraphIndex, h: &EdgeColoring, phi_prime: &EdgeColoring) -> Vec<(Phase, EdgeId)> {
    let mut out: Vec<(Phase, EdgeId)> = phi_prime
        .colored_edges()
        .filter(|&(e, c)| h.raw(e) != c)
        .map(|(e, c)| (Phase::of(index, e, c), e))
        .collect();
    out.sort_unstable();
    out
}

/// Solves an instance of any order: even orders directly, odd ones by
/// embedding.
pub fn solve_instance(inst: &Instance, preset: Preset, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    let n = inst.order.div_ceil(2);
    let params = ParameterSet::for_preset(preset, n.max(2));
    if inst.order % 2 == 0 {
        solve(inst, &params, cfg)
    } else {
        solve_odd(inst, &params, cfg)
    }
}

/// Extends the precoloring of `inst` on K_{2n} to a total proper coloring
/// avoiding the lists.
pub fn solve(inst: &Instance, params: &ParameterSet, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    inst.validate()?;
    if inst.order % 2 != 0 || params.n * 2 != inst.order {
        return Err(ModelError::Malformed(format!("solve needs K_{{2n}} with n = {}, got K_{}", params.n, inst.order)).into());
    }
    with_fallback(inst, cfg, || {
        let sol = pipeline(inst, params, cfg)?;
        let report = verify_solution(inst, &sol.coloring);
        if report.is_clean() {
            Ok(sol)
        } else {
            Err(SolveError::Verify(report))
        }
    })
}

/// Odd orders: adds a last vertex with no precolored or listed edges, solves
/// on K_{2n} and restricts.
pub fn solve_odd(inst: &Instance, params: &ParameterSet, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    inst.validate()?;
    if inst.order % 2 != 1 || params.n * 2 != inst.order + 1 {
        return Err(ModelError::Malformed(format!("solve_odd needs K_{{2n-1}} with n = {}, got K_{}", params.n, inst.order)).into());
    }
    let big = embed(inst);
    with_fallback(inst, cfg, || {
        let mut sol = pipeline(&big, params, cfg)?;
        sol.coloring = restrict(&sol.coloring, inst.graph());
        let report = verify_solution(inst, &sol.coloring);
        if report.is_clean() {
            Ok(sol)
        } else {
            Err(SolveError::Verify(report))
        }
    })
}

/// The same precoloring and lists on K_{p+1}. Edge ids do not depend on the
/// order, so every edge keeps its id.
pub fn embed(inst: &Instance) -> Instance {
    let g = CompleteGraph::new(inst.order + 1);
    let t = inst.colors;
    let mut phi = EdgeColoring::new(g.clone(), t);
    for (e, c) in inst.phi.colored_edges() {
        phi.set(e, c).expect("embedding keeps properness");
    }
    let mut lists = ListAssignment::new(g, t);
    for (e, l) in inst.lists.nonempty() {
        for &c in l {
            lists.insert(e, c).expect("same color range");
        }
    }
    Instance {
        order: inst.order + 1,
        colors: t,
        phi,
        lists,
        meta: inst.meta.clone(),
    }
}

/// `h` restricted to the subgraph `g` induced on its first vertices.
pub fn restrict(h: &EdgeColoring, g: &CompleteGraph) -> EdgeColoring {
    let mut out = EdgeColoring::new(g.clone(), h.num_colors());
    for e in g.edges() {
        if let Some(c) = h.get(e) {
            out.set(e, c).expect("restriction keeps properness");
        }
    }
    out
}

fn with_fallback(inst: &Instance, cfg: &SolveConfig, run: impl FnOnce() -> Result<Solution, SolveError>) -> Result<Solution, SolveError> {
    match run() {
        Ok(s) => Ok(s),
        Err(err) => {
            let Some(cap) = cfg.oracle_fallback.filter(|&cap| inst.order <= cap) else {
                return Err(err);
            };
            let ocfg = OracleConfig {
                cap,
                ..OracleConfig::default()
            };
            match oracle_solve_with(inst, ocfg) {
                Ok(OracleOutcome::Feasible(coloring)) => Ok(Solution {
                    coloring,
                    hprime: None,
                    phi_prime: None,
                    rho: None,
                    trace: None,
                    stats: err.stats().cloned().unwrap_or_default(),
                    source: Source::Oracle,
                }),
                _ => Err(err),
            }
        }
    }
}

fn pipeline(inst: &Instance, params: &ParameterSet, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    let index = CompleteGraphIndex::new(params.n)?;
    let h = standard_coloring(&index);
    let mut start = 0;
    let mut restarts = 0;
    loop {
        let sampled = sample_good_relabeling_from(&index, &h, &inst.phi, &inst.lists, params, cfg.seed, start, cfg.max_tries, cfg.strategy)?;
        start = sampled.tries;
        match attempt(&index, inst, params, cfg, sampled, restarts) {
            Err(SolveError::Extend(_) | SolveError::Correction { .. } | SolveError::Retries { .. })
                if restarts < cfg.restarts && start < cfg.max_tries =>
            {
                restarts += 1;
            }
            r => return r,
        }
    }
}

/// Absorption and correction on one accepted relabeling.
fn attempt(
    index: &CompleteGraphIndex,
    inst: &Instance,
    params: &ParameterSet,
    cfg: &SolveConfig,
    sampled: Sampled,
    restarts: usize,
) -> Result<Solution, SolveError> {
    let (phi, lists) = (&inst.phi, &inst.lists);
    let ext = extend_to_phi_prime(index, phi, &sampled.hprime, lists, params)?;
    let phi_prime = ext.phi_prime;
    let baseline = &sampled.report.deficient_edges;

    let mut stats = SolveStats {
        n: params.n,
        tries: sampled.tries,
        restarts,
        absorbed: ext.added.len(),
        baseline: baseline.len(),
        h_n: params.h_n,
        k_n2: params.k_n2(),
        correction_bound: params.correction_bound(),
        ..SolveStats::default()
    };
    let mut engine = SwapEngine::new(index, sampled.hprime.clone(), lists, &phi_prime, params, baseline);
    if let Some(s) = cfg.search {
        engine = engine.with_config(s);
    }

    let q = miscolored(index, engine.coloring(), &phi_prime).len();
    stats.queue_len = q;
    let limit = cfg.retry_factor * q.max(1);
    let mut attempts = 0;
    // Edges that failed since the last successful correction.
    let mut stuck: Vec<EdgeId> = Vec::new();
    let mut first_failure: Option<(EdgeId, Phase, SwapError)> = None;
    loop {
        let pending = miscolored(index, engine.coloring(), &phi_prime);
        let Some(&(phase, _)) = pending.first() else { break };
        let next = pending.iter().find(|&&(p, e)| p == phase && !stuck.contains(&e));
        let Some(&(phase, e)) = next else {
            let (edge, phase, error) = first_failure.expect("a failure made the phase stick");
            return Err(SolveError::Correction {
                edge,
                phase,
                error,
                stats: Box::new(finish_stats(stats, &engine)),
            });
        };
        if attempts == limit {
            return Err(SolveError::Retries {
                limit,
                stats: Box::new(finish_stats(stats, &engine)),
            });
        }
        attempts += 1;
        match engine.correct_edge(e) {
            Ok(c) => {
                stuck.clear();
                first_failure = None;
                stats.record(CorrectionStep {
                    edge: e,
                    phase,
                    case: c.case,
                    swaps: c.outcome.swaps,
                    touched: c.outcome.touched,
                    recolored_prescribed: c.recolored_prescribed,
                });
                if cfg.self_check {
                    engine.self_check().map_err(ModelError::Malformed)?;
                }
            }
            Err(err) => {
                stats.deferrals += 1;
                stuck.push(e);
                first_failure.get_or_insert((e, phase, err));
            }
        }
    }

    let mut stats = finish_stats(stats, &engine);
    if let Err(what) = check_bounds(params, &stats) {
        if params.preset == Preset::Paper {
            return Err(SolveError::Bound {
                what,
                stats: Box::new(stats),
            });
        }
        stats.warnings.push(what);
    }
    let (hq, trace) = engine.into_parts();
    Ok(Solution {
        coloring: hq,
        hprime: Some(sampled.hprime),
        phi_prime: Some(phi_prime),
        rho: Some(sampled.rho),
        trace: Some(trace),
        stats,
        source: Source::Pipeline,
    })
}

fn finish_stats(mut stats: SolveStats, engine: &SwapEngine<'_>) -> SolveStats {
    let t = engine.trace();
    stats.disturbed = t.disturbed_count();
    stats.swapped_edges = t.swapped_edge_count();
    stats.max_color_disturbed = (1..=engine.index().m()).map(|c| t.disturbed_by_color(c)).max().unwrap_or(0);
    stats
}

/// The accounting bounds, first failure described.
pub fn check_bounds(params: &ParameterSet, stats: &SolveStats) -> Result<(), String> {
    if stats.queue_len > stats.correction_bound {
        return Err(format!("{} corrections exceed 2n(am + c(n)) = {}", stats.queue_len, stats.correction_bound));
    }
    if stats.swapped_edges > 205 * stats.queue_len {
        return Err(format!("{} swapped edges exceed 205 q = {}", stats.swapped_edges, 205 * stats.queue_len));
    }
    if stats.disturbed > params.k_n2() {
        return Err(format!("{} disturbed edges exceed kn^2 = {}", stats.disturbed, params.k_n2()));
    }
    if stats.max_color_disturbed > params.h_n {
        return Err(format!("{} disturbed edges of one color exceed H(n) = {}", stats.max_color_disturbed, params.h_n));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Uncolored(EdgeId),
    OutOfRange { edge: EdgeId, color: Color },
    /// Two edges at `vertex` share `color`.
    Improper { vertex: Vertex, color: Color, edges: (EdgeId, EdgeId) },
    Disagrees { edge: EdgeId, want: Color, got: Color },
    Listed { edge: EdgeId, color: Color },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncolored(e) => write!(f, "edge {e} is uncolored"),
            Violation::OutOfRange { edge, color } => write!(f, "edge {edge} has color {color} out of range"),
            Violation::Improper { vertex, color, edges } => {
                write!(f, "edges {} and {} share color {color} at vertex {vertex}", edges.0, edges.1)
            }
            Violation::Disagrees { edge, want, got } => write!(f, "edge {edge} is precolored {want} but has {got}"),
            Violation::Listed { edge, color } => write!(f, "edge {edge} has color {color} from its list"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "clean");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn verify_solution(inst: &Instance, coloring: &EdgeColoring) -> VerifyReport {
    let colors: Vec<Color> = inst.graph().edges().map(|e| coloring.get(e).unwrap_or(0)).collect();
    verify_assignment(inst, &colors)
}

/// Checks a raw assignment (`colors[e]`, 0 for uncolored) with its own
/// scans: coverage and range, properness at every vertex, agreement with the
/// precoloring, avoidance of the lists.
pub fn verify_assignment(inst: &Instance, colors: &[Color]) -> VerifyReport {
    let g = inst.graph();
    let t = inst.colors;
    let mut out = Vec::new();
    let mut seen: Vec<Option<EdgeId>> = vec![None; g.order() * (t + 1)];
    for e in g.edges() {
        let c = colors.get(e.0).copied().unwrap_or(0);
        if c == 0 {
            out.push(Violation::Uncolored(e));
            continue;
        }
        if c > t {
            out.push(Violation::OutOfRange { edge: e, color: c });
            continue;
        }
        let (u, v) = g.endpoints(e);
        for w in [u, v] {
            let slot = &mut seen[w * (t + 1) + c];
            match slot {
                Some(f) => out.push(Violation::Improper {
                    vertex: w,
                    color: c,
                    edges: (*f, e),
                }),
                None => *slot = Some(e),
            }
        }
    }
    for e in g.edges() {
        let c = colors.get(e.0).copied().unwrap_or(0);
        if let Some(want) = inst.phi.get(e) {
            if want != c {
                out.push(Violation::Disagrees { edge: e, want, got: c });
            }
        }
        if c != 0 && inst.lists.list(e).contains(&c) {
            out.push(Violation::Listed { edge: e, color: c });
        }
    }
    VerifyReport { violations: out }
}
