//! Recoloring one mis-colored prescribed edge to its prescribed color.

use crate::model::{Color, EdgeId, Part, Side, Vertex};
use crate::swap::{OpOutcome, SwapEngine, SwapError, SwapRequest};

/// Position of the edge and of its prescribed color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    /// K_{n,n} edge, K_{n,n} color.
    KnnLow,
    /// K_{n,n} edge, clique color.
    KnnHigh,
    /// Clique edge, K_{n,n} color.
    CliqueLow,
    /// Clique edge, clique color.
    CliqueHigh,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::KnnLow, Case::KnnHigh, Case::CliqueLow, Case::CliqueHigh];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn budget(self) -> usize {
        match self {
            Case::KnnLow => 69,
            Case::KnnHigh => 136,
            Case::CliqueLow => 139,
            Case::CliqueHigh => 205,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub edge: EdgeId,
    pub case: Case,
    pub outcome: OpOutcome,
    /// Swapped edges that carried the old color of `edge` beforehand.
    pub old_color_edges: usize,
    /// Swapped edges that carried the prescribed color beforehand.
    pub new_color_edges: usize,
    /// Other prescribed edges whose color changed.
    pub recolored_prescribed: Vec<EdgeId>,
}

impl SwapEngine<'_> {
    /// Gives the prescribed edge `uv` its prescribed color. The only other
    /// prescribed edges that may change are the two edges at `u` and `v`
    /// that currently carry that color.
    pub fn correct_edge(&mut self, uv: EdgeId) -> Result<Correction, SwapError> {
        const OP: &str = "correct";
        let ix = self.index();
        let c1 = self.color(uv);
        let Some(c2) = self.prescribed().get(uv) else {
            return Err(SwapError::pre(OP, format!("{uv} is not prescribed")));
        };
        if c1 == c2 {
            return Err(SwapError::pre(OP, format!("{uv} already has color {c2}")));
        }
        let part = ix.part(uv);
        let case = match (part, ix.is_low(c2)) {
            (Part::Knn, true) => Case::KnnLow,
            (Part::Knn, false) => Case::KnnHigh,
            (_, true) => Case::CliqueLow,
            (_, false) => Case::CliqueHigh,
        };
        let (mut u, mut v) = ix.endpoints(uv);
        if part == Part::Knn && ix.side(u) != Side::P {
            std::mem::swap(&mut u, &mut v);
        }
        let h = self.coloring();
        let (Some(e1), Some(e2)) = (h.edge_at(u, c2), h.edge_at(v, c2)) else {
            return Err(SwapError::pre(OP, format!("color {c2} is missing at an end of {uv}")));
        };

        let overloaded = self.overload_snapshot();
        let check_req = SwapRequest {
            avoided: Vec::new(),
            protected: Vec::new(),
            allowed_prescribed: vec![uv, e1, e2],
        };
        let mut check = self.contract(OP, case.budget(), &check_req);
        check.exempt = vec![c1, c2];
        check.overloaded = overloaded.clone();
        let base = SwapRequest {
            avoided: vec![c1, c2],
            protected: vec![uv],
            allowed_prescribed: Vec::new(),
        };

        let cp = self.checkpoint();
        let mut tally = crate::swap::ExclusionTally::default();
        let limit = 2 * self.config().candidates;
        let mut attempts = 0;
        let mut done = false;
        if part == Part::Knn {
            for (x, y) in self.knn_partners(u, v, c1, c2) {
                if attempts == limit {
                    break;
                }
                attempts += 1;
                let xy = EdgeId::of(x, y);
                let r = self.route_pair(&base, c2, [e1, e2], (u, y), (v, x), xy).and_then(|_| {
                    self.swap(&[u, v, x, y])?;
                    self.finish_check(cp, &check, uv, c2, &overloaded)
                });
                match r {
                    Ok(()) => {
                        done = true;
                        break;
                    }
                    Err(e) => {
                        self.rollback(cp);
                        tally.bump(e.reason());
                    }
                }
            }
        } else {
            let other = if ix.side(u) == Side::P { Side::Q } else { Side::P };
            let mut tried: Vec<EdgeId> = Vec::new();
            while attempts < limit && !done {
                attempts += 1;
                // An edge of the other clique colored c1, placed there first
                // when none exists.
                let xy = if let Some(xy) = self.clique_partner(u, v, c1, c2, other, &tried) {
                    xy
                } else if ix.is_high(c1) {
                    break;
                } else {
                    let accept = |eng: &SwapEngine<'_>, e: EdgeId| !tried.contains(&e) && eng.clique_partner_ok(u, v, c1, c2, e);
                    match self.place_low_color_in_clique(c1, other, &base, &accept) {
                        Ok((xy, _)) => xy,
                        Err(e) => {
                            tally.bump(e.reason());
                            break;
                        }
                    }
                };
                tried.push(xy);
                let after_place = self.checkpoint();
                let (a, b) = ix.endpoints(xy);
                for (x, y) in [(a, b), (b, a)] {
                    if !self.orientation_ok(u, v, x, y, c1) {
                        continue;
                    }
                    let r = self.route_pair(&base, c2, [e1, e2], (u, x), (v, y), xy).and_then(|_| {
                        self.swap(&[u, v, y, x])?;
                        self.finish_check(cp, &check, uv, c2, &overloaded)
                    });
                    match r {
                        Ok(()) => {
                            done = true;
                            break;
                        }
                        Err(e) => {
                            self.rollback(after_place);
                            tally.bump(e.reason());
                        }
                    }
                }
                if !done {
                    self.rollback(cp);
                }
            }
        }
        if !done {
            return Err(SwapError::NoCandidate {
                op: OP,
                stage: "xy",
                tally,
            });
        }
        let t = self.touched_since(cp);
        let recolored_prescribed = t
            .edges
            .iter()
            .filter(|&&(e, c)| e != uv && self.is_prescribed(e) && self.color(e) != c)
            .map(|&(e, _)| e)
            .collect();
        Ok(Correction {
            edge: uv,
            case,
            outcome: t.outcome(self.coloring()),
            old_color_edges: t.count_colored(c1),
            new_color_edges: t.count_colored(c2),
            recolored_prescribed,
        })
    }

    /// Moves the color of `source`, an edge at `anchor`, onto
    /// `anchor target`, picking the operation that fits where the edge and
    /// color live.
    fn move_color(&mut self, source: EdgeId, anchor: Vertex, target: Vertex, req: &SwapRequest) -> Result<OpOutcome, SwapError> {
        let ix = self.index();
        let c = self.color(source);
        if !ix.is_knn(source) {
            self.push_clique_color_to_knn(source, anchor, target, req)
        } else if ix.is_low(c) {
            self.pull_color_to_neighbor_knn(source, target, req)
        } else if self.coloring().edge_at(target, c).is_some_and(|f| ix.is_knn(f)) {
            self.pull_knn(source, target, req, true)
        } else {
            self.pull_high_color_along_knn(source, target, req)
        }
    }

    /// Gives both `first` and `second` (as `(anchor, target)` pairs) color
    /// `want`, taken from the `want`-edges at the anchors. Only `sources`
    /// may be recolored among prescribed edges; `xy` and each finished edge
    /// stay put.
    fn route_pair(
        &mut self,
        base: &SwapRequest,
        want: Color,
        sources: [EdgeId; 2],
        first: (Vertex, Vertex),
        second: (Vertex, Vertex),
        xy: EdgeId,
    ) -> Result<(), SwapError> {
        let mut protect = vec![xy];
        for (anchor, target) in [first, second] {
            let goal = EdgeId::of(anchor, target);
            if self.color(goal) != want {
                let Some(src) = self.coloring().edge_at(anchor, want) else {
                    return Err(SwapError::pre("correct", format!("color {want} left {anchor}")));
                };
                let allowed: Vec<EdgeId> = sources.iter().copied().filter(|&e| e == src).collect();
                let req = base.nested(None, &protect, &allowed);
                self.move_color(src, anchor, target, &req)?;
            }
            protect.push(goal);
        }
        Ok(())
    }

    /// Postconditions of a correction beyond the shared contract.
    fn finish_check(
        &mut self,
        cp: usize,
        check: &crate::swap::Contract<'_>,
        uv: EdgeId,
        c2: Color,
        overloaded: &[bool],
    ) -> Result<(), SwapError> {
        let t = self.verify(cp, check)?;
        let fail = |reason: String| Err(SwapError::Contract { op: "correct", reason });
        if self.color(uv) != c2 {
            return fail(format!("{uv} did not receive {c2}"));
        }
        for &(e, orig) in &t.edges {
            if e == uv || !self.is_prescribed(e) {
                continue;
            }
            let now = self.color(e);
            if now != orig && overloaded[now] {
                return fail(format!("prescribed {e} took overloaded color {now}"));
            }
        }
        Ok(())
    }

    /// K_{n,n} edges `xy` colored `c1` usable with `uv` (`u` and `x` on the
    /// P side), best first.
    fn knn_partners(&self, u: Vertex, v: Vertex, c1: Color, c2: Color) -> Vec<(Vertex, Vertex)> {
        let ix = self.index();
        let lists = self.lists();
        let mut out = Vec::new();
        for &xy in self.coloring().class(c1) {
            if !ix.is_knn(xy) || self.is_prescribed(xy) || lists.contains(xy, c2) {
                continue;
            }
            let (x, y) = ix.knn_endpoints(xy);
            if x == u || y == v {
                continue;
            }
            let (uy, vx) = (EdgeId::of(u, y), EdgeId::of(v, x));
            if lists.contains(uy, c1) || lists.contains(vx, c1) || self.is_prescribed(uy) || self.is_prescribed(vx) {
                continue;
            }
            if let Some(r) = self.rank(&[xy]) {
                out.push((r, xy, x, y));
            }
        }
        out.sort_unstable();
        out.into_iter().map(|(_, _, x, y)| (x, y)).collect()
    }

    fn clique_partner_ok(&self, u: Vertex, v: Vertex, c1: Color, c2: Color, xy: EdgeId) -> bool {
        let (a, b) = self.index().endpoints(xy);
        !self.lists().contains(xy, c2)
            && !self.requested_with(xy, c2)
            && (self.orientation_ok(u, v, a, b, c1) || self.orientation_ok(u, v, b, a, c1))
    }

    fn orientation_ok(&self, u: Vertex, v: Vertex, x: Vertex, y: Vertex, c1: Color) -> bool {
        let (ux, vy) = (EdgeId::of(u, x), EdgeId::of(v, y));
        let l = self.lists();
        !l.contains(ux, c1) && !l.contains(vy, c1) && !self.is_prescribed(ux) && !self.is_prescribed(vy)
    }

    /// Undisturbed-first edge of the clique on `side` colored `c1`.
    fn clique_partner(&self, u: Vertex, v: Vertex, c1: Color, c2: Color, side: Side, tried: &[EdgeId]) -> Option<EdgeId> {
        let ix = self.index();
        let mut best: Option<(usize, EdgeId)> = None;
        for &xy in self.coloring().class(c1) {
            if ix.part(xy) != side.clique() || tried.contains(&xy) || self.is_prescribed(xy) {
                continue;
            }
            if !self.clique_partner_ok(u, v, c1, c2, xy) {
                continue;
            }
            if let Some(r) = self.rank(&[xy]) {
                if best.is_none_or(|b| (r, xy) < b) {
                    best = Some((r, xy));
                }
            }
        }
        best.map(|b| b.1)
    }
}
