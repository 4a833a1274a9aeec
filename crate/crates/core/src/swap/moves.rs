//! Moving a color onto an adjacent edge, within K_{n,n} or across a
//! clique, and placing a K_{n,n} color inside a clique.

use super::{ExclusionTally, OpOutcome, SwapEngine, SwapError, SwapRequest};
use crate::model::{Color, EdgeId, Part, Side, Vertex};

pub const PULL_BUDGET: usize = 34;
pub const PUSH_BUDGET: usize = 34;
pub const PULL_HIGH_BUDGET: usize = 67;
pub const PLACE_BUDGET: usize = 70;

type Step<T = ()> = Result<T, SwapError>;

impl SwapEngine<'_> {
    /// Rank of a candidate under the disturbed-edge filter: `None` when the
    /// filter is a hard rule and the candidate fails it.
    pub(crate) fn rank(&self, disturbed: &[EdgeId]) -> Option<usize> {
        let k = disturbed.iter().filter(|&&e| self.trace.is_disturbed(e)).count();
        if k > 0 && self.config.strict_selection {
            None
        } else {
            Some(k)
        }
    }

    /// Can `e` be recolored by an exchange under `req`?
    fn exchangeable(&self, e: EdgeId, req: &SwapRequest, overloaded: &[bool]) -> bool {
        let c = self.color(e);
        self.index.is_knn(e)
            && !req.protects(e)
            && !(self.is_prescribed(e) && !req.may_recolor_prescribed(e))
            && !req.avoids(c)
            && !overloaded[c]
    }

    /// Gives `target_edge` (at `shared`) color `c` by exchanging with the
    /// `c`-edge at `shared`, unless it already has it.
    fn bring_color(&mut self, target_edge: EdgeId, shared: Vertex, c: Color, req: &SwapRequest) -> Step {
        if self.color(target_edge) == c {
            return Ok(());
        }
        let Some(e) = self.h.edge_at(shared, c) else {
            return Err(SwapError::pre("exchange", format!("no {c}-edge at {shared}")));
        };
        self.exchange_adjacent_knn(target_edge, e, req).map(|_| ())
    }

    /// Runs `attempt` for each candidate until one satisfies the contract.
    pub(crate) fn first_working<C: Copy>(
        &mut self,
        op: &'static str,
        stage: &'static str,
        candidates: &[C],
        mut tally: ExclusionTally,
        mut attempt: impl FnMut(&mut Self, C) -> Step,
        check: &super::Contract<'_>,
    ) -> Result<OpOutcome, SwapError> {
        let cp = self.checkpoint();
        for &cand in candidates {
            match attempt(self, cand).and_then(|_| self.verify(cp, check)) {
                Ok(t) => return Ok(t.outcome(&self.h)),
                Err(e) => {
                    self.rollback(cp);
                    tally.bump(e.reason());
                }
            }
        }
        Err(SwapError::NoCandidate { op, stage, tally })
    }

    /// Makes `u1 v2` take the color `c1 ≤ n` of the K_{n,n} edge
    /// `source = u1 u2`, where `target = v2` lies on the side of `u2`.
    /// Only edges of K_{n,n} are swapped, at most [`PULL_BUDGET`] of them.
    pub fn pull_color_to_neighbor_knn(&mut self, source: EdgeId, target: Vertex, req: &SwapRequest) -> Result<OpOutcome, SwapError> {
        self.pull_knn(source, target, req, false)
    }

    /// The same construction for any color whose edge at `target` lies in
    /// K_{n,n}; with `any_color` set, clique colors are accepted too.
    pub(crate) fn pull_knn(&mut self, source: EdgeId, target: Vertex, req: &SwapRequest, any_color: bool) -> Result<OpOutcome, SwapError> {
        const OP: &str = "pull";
        let ix = self.index;
        let (u1, u2) = orient(self, source, target).ok_or_else(|| SwapError::pre(OP, "source must be a K_{n,n} edge with target beside it"))?;
        if u2 == target {
            return Ok(OpOutcome::default());
        }
        let v2 = target;
        let c1 = self.color(source);
        if !any_color && !ix.is_low(c1) {
            return Err(SwapError::pre(OP, format!("color {c1} is not a K_{{n,n}} color")));
        }
        let req = &req.nested(Some(c1), &[], &req.allowed_prescribed);
        let overloaded = self.overload_snapshot();
        let v1 = match self.h.neighbor(v2, c1) {
            Some(v) if ix.side(v) == ix.side(u1) => v,
            _ => return Err(SwapError::pre(OP, format!("{c1}-edge at {v2} is not in K_{{n,n}}"))),
        };
        let (u1v2, u2v1, v1v2) = (EdgeId::of(u1, v2), EdgeId::of(u2, v1), EdgeId::of(v1, v2));
        if self.is_prescribed(v1v2) || req.protects(v1v2) {
            return Err(SwapError::pre(OP, format!("{v1v2} may not be recolored")));
        }
        if self.rank(&[v1v2]).is_none() {
            return Err(SwapError::pre(OP, format!("{v1v2} is disturbed")));
        }
        if self.lists.contains(u1v2, c1) || self.lists.contains(u2v1, c1) {
            return Err(SwapError::pre(OP, format!("{c1} is listed on {u1v2} or {u2v1}")));
        }
        let sub = req.nested(None, &[source, v1v2], &[]);
        for e in [u1v2, u2v1] {
            if !self.exchangeable(e, &sub, &overloaded) {
                return Err(SwapError::pre(OP, format!("{e} cannot be exchanged")));
            }
        }

        let mut tally = ExclusionTally::default();
        let mut ranked = Vec::new();
        for c2 in 1..=ix.n() {
            if c2 == c1 || req.avoids(c2) || overloaded[c2] {
                tally.bump("color");
                continue;
            }
            if self.lists.contains(source, c2) || self.lists.contains(v1v2, c2) {
                tally.bump("list");
                continue;
            }
            let (Some(e1), Some(e2)) = (self.h.edge_at(u1, c2), self.h.edge_at(u2, c2)) else {
                tally.bump("missing");
                continue;
            };
            if !(e1 == u1v2 || self.exchangeable(e1, &sub, &overloaded)) || !(e2 == u2v1 || self.exchangeable(e2, &sub, &overloaded)) {
                tally.bump("second edge");
                continue;
            }
            match self.rank(&[e1, e2]) {
                Some(r) => ranked.push((r, c2)),
                None => tally.bump("disturbed"),
            }
        }
        ranked.sort_unstable();
        let cands: Vec<Color> = ranked.into_iter().take(self.config.candidates).map(|x| x.1).collect();
        let mut check = self.contract(OP, PULL_BUDGET, req);
        check.exempt = vec![c1];
        check.knn_only = true;
        self.first_working(
            OP,
            "c2",
            &cands,
            tally,
            |eng, c2| {
                eng.bring_color(u1v2, u1, c2, &sub)?;
                let sub2 = sub.nested(None, &[u1v2], &[]);
                eng.bring_color(u2v1, u2, c2, &sub2)?;
                eng.swap(&[u1, u2, v1, v2]).map(|_| ())
            },
            &check,
        )
    }

    /// Makes the K_{n,n} edge `anchor target` take the color `c1 > n` of the
    /// clique edge `source`, which contains `anchor`. At most
    /// [`PUSH_BUDGET`] edges are swapped.
    pub fn push_clique_color_to_knn(&mut self, source: EdgeId, anchor: Vertex, target: Vertex, req: &SwapRequest) -> Result<OpOutcome, SwapError> {
        const OP: &str = "push";
        let ix = self.index;
        let (a, b) = ix.endpoints(source);
        if ix.is_knn(source) || (a != anchor && b != anchor) || ix.side(target) == ix.side(anchor) {
            return Err(SwapError::pre(OP, "source must be a clique edge at anchor, target across"));
        }
        let (u1, v1, u2) = (anchor, ix.other(source, anchor), target);
        let c1 = self.color(source);
        if !ix.is_high(c1) {
            return Err(SwapError::pre(OP, format!("color {c1} is not a clique color")));
        }
        let req = &req.nested(Some(c1), &[], &req.allowed_prescribed);
        let overloaded = self.overload_snapshot();
        let v2 = match self.h.neighbor(u2, c1) {
            Some(v) if ix.side(v) == ix.side(u2) => v,
            _ => return Err(SwapError::pre(OP, format!("{c1}-edge at {u2} is not a clique edge"))),
        };
        let (u1u2, v1v2, u2v2) = (EdgeId::of(u1, u2), EdgeId::of(v1, v2), EdgeId::of(u2, v2));
        if self.is_prescribed(u2v2) || req.protects(u2v2) {
            return Err(SwapError::pre(OP, format!("{u2v2} may not be recolored")));
        }
        if self.rank(&[u2v2]).is_none() {
            return Err(SwapError::pre(OP, format!("{u2v2} is disturbed")));
        }
        if self.lists.contains(u1u2, c1) || self.lists.contains(v1v2, c1) {
            return Err(SwapError::pre(OP, format!("{c1} is listed on {u1u2} or {v1v2}")));
        }
        let sub = req.nested(None, &[source, u2v2], &[]);
        for e in [u1u2, v1v2] {
            if !self.exchangeable(e, &sub, &overloaded) {
                return Err(SwapError::pre(OP, format!("{e} cannot be exchanged")));
            }
        }
        let own = [self.prescribed.get(source), self.prescribed.get(u2v2)];
        let mut tally = ExclusionTally::default();
        let mut ranked = Vec::new();
        for c2 in 1..=ix.n() {
            if req.avoids(c2) || overloaded[c2] {
                tally.bump("color");
                continue;
            }
            if self.lists.contains(source, c2) || self.lists.contains(u2v2, c2) {
                tally.bump("list");
                continue;
            }
            let in_palette = [u1, u2, v1, v2].iter().any(|&w| self.prescribed.has_color_at(w, c2));
            if in_palette && !own.contains(&Some(c2)) {
                tally.bump("palette");
                continue;
            }
            let (Some(e1), Some(e2)) = (self.h.edge_at(u1, c2), self.h.edge_at(v1, c2)) else {
                tally.bump("missing");
                continue;
            };
            if !(e1 == u1u2 || self.exchangeable(e1, &sub, &overloaded)) || !(e2 == v1v2 || self.exchangeable(e2, &sub, &overloaded)) {
                tally.bump("second edge");
                continue;
            }
            match self.rank(&[e1, e2]) {
                Some(r) => ranked.push((r, c2)),
                None => tally.bump("disturbed"),
            }
        }
        ranked.sort_unstable();
        let cands: Vec<Color> = ranked.into_iter().take(self.config.candidates).map(|x| x.1).collect();
        let mut check = self.contract(OP, PUSH_BUDGET, req);
        check.exempt = vec![c1];
        self.first_working(
            OP,
            "c2",
            &cands,
            tally,
            |eng, c2| {
                eng.bring_color(u1u2, u1, c2, &sub)?;
                let sub2 = sub.nested(None, &[u1u2], &[]);
                eng.bring_color(v1v2, v1, c2, &sub2)?;
                eng.swap(&[u1, u2, v2, v1]).map(|_| ())
            },
            &check,
        )
    }

    /// Makes `u1 v2` take the color `c1 > n` of the K_{n,n} edge
    /// `source = u1 u2`, routing it through the clique of `v2`. At most
    /// [`PULL_HIGH_BUDGET`] edges are swapped.
    pub fn pull_high_color_along_knn(&mut self, source: EdgeId, target: Vertex, req: &SwapRequest) -> Result<OpOutcome, SwapError> {
        const OP: &str = "pull-high";
        let ix = self.index;
        let (u1, u2) = orient(self, source, target).ok_or_else(|| SwapError::pre(OP, "source must be a K_{n,n} edge with target beside it"))?;
        if u2 == target {
            return Ok(OpOutcome::default());
        }
        let v2 = target;
        let c1 = self.color(source);
        if !ix.is_high(c1) {
            return Err(SwapError::pre(OP, format!("color {c1} is not a clique color")));
        }
        let req = &req.nested(Some(c1), &[], &req.allowed_prescribed);
        let overloaded = self.overload_snapshot();
        let x = match self.h.neighbor(v2, c1) {
            Some(x) if ix.side(x) == ix.side(v2) => x,
            _ => return Err(SwapError::pre(OP, format!("{c1}-edge at {v2} is not a clique edge"))),
        };
        let (u1v2, v2x) = (EdgeId::of(u1, v2), EdgeId::of(v2, x));
        if self.is_prescribed(v2x) || req.protects(v2x) || self.rank(&[v2x]).is_none() {
            return Err(SwapError::pre(OP, format!("{v2x} may not be recolored")));
        }
        if self.lists.contains(u1v2, c1) {
            return Err(SwapError::pre(OP, format!("{c1} is listed on {u1v2}")));
        }
        let sub = req.nested(None, &[source, v2x], &[]);
        if !self.exchangeable(u1v2, &sub, &overloaded) {
            return Err(SwapError::pre(OP, format!("{u1v2} cannot be exchanged")));
        }

        let mut tally = ExclusionTally::default();
        let mut vs = Vec::new();
        for v1 in ix.side_vertices(ix.side(u1)) {
            if v1 == u1 {
                continue;
            }
            let (u2v1, v1v2) = (EdgeId::of(u2, v1), EdgeId::of(v1, v2));
            if !self.exchangeable(u2v1, &sub, &overloaded) || self.lists.contains(u2v1, c1) {
                tally.bump("v1");
                continue;
            }
            if self.is_prescribed(v1v2) || self.lists.contains(v1v2, c1) {
                tally.bump("v1v2");
                continue;
            }
            match self.rank(&[v1v2]) {
                Some(r) => vs.push((r, v1)),
                None => tally.bump("disturbed"),
            }
        }
        vs.sort_unstable();
        let mut pairs = Vec::new();
        for &(_, v1) in vs.iter().take(self.config.candidates) {
            let v1v2 = EdgeId::of(v1, v2);
            let mut cs = Vec::new();
            for c2 in 1..=ix.n() {
                if req.avoids(c2) || overloaded[c2] || self.lists.contains(source, c2) || self.lists.contains(v1v2, c2) {
                    continue;
                }
                let (Some(e1), Some(e2)) = (self.h.edge_at(u1, c2), self.h.edge_at(u2, c2)) else {
                    continue;
                };
                let u2v1 = EdgeId::of(u2, v1);
                if (e1 == u1v2 || self.exchangeable(e1, &sub, &overloaded)) && (e2 == u2v1 || self.exchangeable(e2, &sub, &overloaded)) {
                    if let Some(r) = self.rank(&[e1, e2]) {
                        cs.push((r, c2));
                    }
                }
            }
            cs.sort_unstable();
            pairs.extend(cs.into_iter().take(2).map(|(_, c2)| (v1, c2)));
        }
        pairs.truncate(2 * self.config.candidates);
        let mut check = self.contract(OP, PULL_HIGH_BUDGET, req);
        check.exempt = vec![c1];
        self.first_working(
            OP,
            "v1",
            &pairs,
            tally,
            |eng, (v1, c2)| {
                let u2v1 = EdgeId::of(u2, v1);
                eng.bring_color(u1v2, u1, c2, &sub)?;
                eng.bring_color(u2v1, u2, c2, &sub.nested(None, &[u1v2], &[]))?;
                // The push moves v2x itself, so only the outer anchors stay protected.
                eng.push_clique_color_to_knn(v2x, v2, v1, &req.nested(None, &[source, u1v2, u2v1], &[]))?;
                eng.swap(&[u1, u2, v1, v2]).map(|_| ())
            },
            &check,
        )
    }

    /// Recolors some edge `uv` of the clique on `side` with the K_{n,n}
    /// color `c1`, for an edge accepted by `accept`. No prescribed edge is
    /// swapped and at most [`PLACE_BUDGET`] edges are.
    pub fn place_low_color_in_clique(
        &mut self,
        c1: Color,
        side: Side,
        req: &SwapRequest,
        accept: &dyn Fn(&SwapEngine<'_>, EdgeId) -> bool,
    ) -> Result<(EdgeId, OpOutcome), SwapError> {
        const OP: &str = "place";
        let ix = self.index;
        if !ix.is_low(c1) {
            return Err(SwapError::pre(OP, format!("color {c1} is not a K_{{n,n}} color")));
        }
        let req = &req.nested(Some(c1), &[], &[]);
        let overloaded = self.overload_snapshot();
        let mut tally = ExclusionTally::default();
        let fits = |eng: &Self, e: EdgeId| -> bool {
            !eng.is_prescribed(e) && !req.protects(e) && !eng.lists.contains(e, c1) && !eng.requested_with(e, c1)
        };
        // (u, v, x, y) with uv on `side`, xy on the other side, both colored c2.
        let mut quads: Vec<(usize, Vertex, Vertex, Vertex, Vertex)> = Vec::new();
        for c2 in ix.n() + 1..=ix.m() {
            if c2 == c1 || req.avoids(c2) || overloaded[c2] {
                tally.bump("color");
                continue;
            }
            let class: Vec<EdgeId> = self.h.class(c2).iter().copied().collect();
            let mine: Vec<EdgeId> = class.iter().copied().filter(|&e| ix.part(e) == side.clique()).collect();
            let theirs: Vec<EdgeId> = class.iter().copied().filter(|&e| ix.part(e) == side.opposite().clique()).collect();
            let mut per_color = 0;
            for &uv in &mine {
                if !fits(self, uv) || !accept(self, uv) {
                    tally.bump("uv");
                    continue;
                }
                let (p, q) = ix.endpoints(uv);
                for (u, v) in [(p, q), (q, p)] {
                    let (Some(e1), Some(e2)) = (self.h.edge_at(u, c1), self.h.edge_at(v, c1)) else {
                        tally.bump("missing");
                        continue;
                    };
                    if !ix.is_knn(e1) || !ix.is_knn(e2) {
                        tally.bump("e1e2");
                        continue;
                    }
                    let Some(r0) = self.rank(&[uv, e1, e2]) else {
                        tally.bump("disturbed");
                        continue;
                    };
                    for &xy in &theirs {
                        if !fits(self, xy) {
                            continue;
                        }
                        let (a, b) = ix.endpoints(xy);
                        for (x, y) in [(a, b), (b, a)] {
                            let (ux, vy) = (EdgeId::of(u, x), EdgeId::of(v, y));
                            if self.lists.contains(ux, c2) || self.lists.contains(vy, c2) {
                                continue;
                            }
                            if self.is_prescribed(ux) || self.is_prescribed(vy) {
                                continue;
                            }
                            if let Some(r) = self.rank(&[xy]) {
                                quads.push((r0 + r, u, v, x, y));
                                per_color += 1;
                            }
                        }
                    }
                }
                if per_color >= 4 * self.config.candidates {
                    break;
                }
            }
        }
        quads.sort_unstable();
        quads.truncate(2 * self.config.candidates);
        let mut check = self.contract(OP, PLACE_BUDGET, req);
        check.exempt = vec![c1];
        let picked = std::cell::Cell::new(None);
        let out = self.first_working(
            OP,
            "uv",
            &quads,
            tally,
            |eng, (_, u, v, x, y)| {
                let (uv, xy) = (EdgeId::of(u, v), EdgeId::of(x, y));
                let sub = req.nested(None, &[uv, xy], &[]);
                let e1 = eng.h.edge_at(u, c1).ok_or_else(|| SwapError::pre(OP, "c1 left u"))?;
                eng.pull_color_to_neighbor_knn(e1, x, &sub)?;
                let e2 = eng.h.edge_at(v, c1).ok_or_else(|| SwapError::pre(OP, "c1 left v"))?;
                eng.pull_color_to_neighbor_knn(e2, y, &sub.nested(None, &[EdgeId::of(u, x)], &[]))?;
                eng.swap(&[u, v, y, x])?;
                picked.set(Some(uv));
                Ok(())
            },
            &check,
        )?;
        Ok((picked.get().expect("successful attempt records its edge"), out))
    }
}

/// `(u1, u2)` for a K_{n,n} source edge, `u1` being the endpoint across from
/// `target`; `None` if the source is not in K_{n,n}.
fn orient(eng: &SwapEngine<'_>, source: EdgeId, target: Vertex) -> Option<(Vertex, Vertex)> {
    let ix = eng.index;
    if ix.part(source) != Part::Knn {
        return None;
    }
    let (a, b) = ix.endpoints(source);
    let (u1, u2) = if ix.side(a) != ix.side(target) { (a, b) } else { (b, a) };
    Some((u1, u2))
}
