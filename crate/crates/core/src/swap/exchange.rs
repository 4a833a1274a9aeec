//! Exchanging the colors of two adjacent K_{n,n} edges.

use super::{SwapEngine, SwapError, SwapRequest};
use crate::model::{Color, EdgeId, Vertex};

/// Most edges an exchange may swap.
pub const EXCHANGE_BUDGET: usize = 16;

struct Search<'r> {
    u1: Vertex,
    u2: Vertex,
    v2: Vertex,
    first: EdgeId,
    second: EdgeId,
    a: Color,
    b: Color,
    req: &'r SwapRequest,
    overloaded: Vec<bool>,
    /// Edges swapped so far with their colors at the start.
    touched: Vec<(EdgeId, Color)>,
    nodes: usize,
    limit: usize,
}

impl SwapEngine<'_> {
    /// Swaps the colors of two K_{n,n} edges sharing an endpoint using only
    /// swaps inside K_{n,n}, at most [`EXCHANGE_BUDGET`] edges in total.
    ///
    /// No swapped edge is prescribed (unless allowed by `req`), protected, or
    /// carried an avoided or overloaded color at the start.
    pub fn exchange_adjacent_knn(&mut self, first: EdgeId, second: EdgeId, req: &SwapRequest) -> Result<super::OpOutcome, SwapError> {
        const OP: &str = "exchange";
        let ix = self.index;
        if !ix.is_knn(first) || !ix.is_knn(second) {
            return Err(SwapError::pre(OP, "both edges must lie in K_{n,n}"));
        }
        let (f0, f1) = ix.endpoints(first);
        let (s0, s1) = ix.endpoints(second);
        let u1 = if f0 == s0 || f0 == s1 {
            f0
        } else if f1 == s0 || f1 == s1 {
            f1
        } else {
            return Err(SwapError::pre(OP, format!("{first} and {second} are not adjacent")));
        };
        if first == second {
            return Err(SwapError::pre(OP, "edges coincide"));
        }
        let a = self.color(first);
        let b = self.color(second);
        let overloaded = self.overload_snapshot();
        for c in [a, b] {
            if req.avoids(c) || overloaded[c] {
                return Err(SwapError::pre(OP, format!("color {c} is avoided or overloaded")));
            }
        }
        for e in [first, second] {
            if req.protects(e) || (self.is_prescribed(e) && !req.may_recolor_prescribed(e)) {
                return Err(SwapError::pre(OP, format!("{e} may not be recolored")));
            }
        }
        self.stats.exchange_calls += 1;
        let mut s = Search {
            u1,
            u2: ix.other(first, u1),
            v2: ix.other(second, u1),
            first,
            second,
            a,
            b,
            req,
            overloaded,
            touched: Vec::new(),
            nodes: 0,
            limit: self.config.exchange_nodes,
        };
        let cp = self.checkpoint();
        let mut found = false;
        for depth in 0..=self.config.exchange_depth {
            if self.dfs(&mut s, depth, None) {
                found = true;
                break;
            }
            if s.nodes >= s.limit {
                break;
            }
        }
        self.stats.exchange_nodes += s.nodes;
        if !found {
            self.rollback(cp);
            let mut tally = super::ExclusionTally::default();
            tally.reasons.push(("nodes", s.nodes));
            return Err(SwapError::NoCandidate { op: OP, stage: "search", tally });
        }
        let mut c = self.contract(OP, EXCHANGE_BUDGET, req);
        c.knn_only = true;
        c.overloaded = s.overloaded;
        match self.verify(cp, &c) {
            Ok(t) => Ok(t.outcome(&self.h)),
            Err(e) => {
                self.rollback(cp);
                Err(e)
            }
        }
    }

    fn dfs(&mut self, s: &mut Search<'_>, depth: usize, last: Option<[EdgeId; 4]>) -> bool {
        s.nodes += 1;
        let cf = self.color(s.first);
        let cs = self.color(s.second);
        if cf == s.b && cs == s.a {
            return true;
        }
        if let Some(cyc) = self.finishing_move(s, cf, cs) {
            let mark = s.touched.len();
            if self.admit(s, &cyc) {
                self.swap(&cyc).expect("admitted cycle is 2-colored and allowed");
                return true;
            }
            s.touched.truncate(mark);
        }
        if depth == 0 || s.nodes >= s.limit {
            return false;
        }
        for cyc in self.moves(s, depth == 1) {
            let key = sorted_key(&cyc);
            if Some(key) == last {
                continue;
            }
            let mark = s.touched.len();
            if !self.admit(s, &cyc) {
                s.touched.truncate(mark);
                continue;
            }
            let cp = self.checkpoint();
            self.swap(&cyc).expect("admitted cycle is 2-colored and allowed");
            if self.dfs(s, depth - 1, Some(key)) {
                return true;
            }
            self.rollback(cp);
            s.touched.truncate(mark);
            if s.nodes >= s.limit {
                return false;
            }
        }
        false
    }

    /// The single swap that completes the exchange from the current state,
    /// if the state allows one.
    fn finishing_move(&self, s: &Search<'_>, cf: Color, cs: Color) -> Option<[Vertex; 4]> {
        let h = &self.h;
        let (u1, u2, v2, a, b) = (s.u1, s.u2, s.v2, s.a, s.b);
        let cyc = if cf == a && cs == b {
            let x = h.neighbor(u2, b)?;
            [u1, u2, x, v2]
        } else if cf == b {
            // second still needs a; its (cs, a) cycle must close.
            let y = h.neighbor(v2, a)?;
            let z = h.neighbor(u1, a)?;
            [u1, v2, y, z]
        } else if cs == a {
            let y = h.neighbor(u2, b)?;
            let z = h.neighbor(u1, b)?;
            [u1, u2, y, z]
        } else {
            return None;
        };
        (self.is_knn_cycle(&cyc) && h.two_colors(&cyc).is_some()).then_some(cyc)
    }

    #[inline]
    pub(crate) fn is_knn_cycle(&self, cyc: &[Vertex; 4]) -> bool {
        let ix = self.index;
        let s0 = ix.side(cyc[0]);
        let distinct = cyc[0] != cyc[2] && cyc[1] != cyc[3];
        distinct && ix.side(cyc[1]) != s0 && ix.side(cyc[2]) == s0 && ix.side(cyc[3]) != s0
    }

    /// Candidate K_{n,n} swaps: first those through the edges that decide
    /// whether the closing cycle exists, then (unless `key_only`, used for
    /// the last move before closing) the rest at the focus vertices.
    fn moves(&self, s: &Search<'_>, key_only: bool) -> Vec<[Vertex; 4]> {
        let ix = self.index;
        let h = &self.h;
        let m = ix.m();
        let mut keys: Vec<EdgeId> = vec![s.first, s.second];
        let x = h.neighbor(s.u2, s.b);
        let y = h.neighbor(s.v2, s.a);
        for (w, z) in [(x, Some(s.u2)), (x, Some(s.v2)), (y, Some(s.v2)), (y, Some(s.u2))] {
            if let (Some(w), Some(z)) = (w, z) {
                if w != z {
                    keys.push(EdgeId::of(w, z));
                }
            }
        }
        let mut edges: Vec<EdgeId> = Vec::new();
        for e in keys {
            if ix.is_knn(e) && !edges.contains(&e) {
                edges.push(e);
            }
        }
        let split = edges.len();
        if !key_only {
            let mut focus = [s.u1, s.u2, s.v2];
            focus.sort_unstable();
            for f in focus {
                for c in 1..=m {
                    if let Some(e) = h.edge_at(f, c) {
                        if ix.is_knn(e) && !edges[..split].contains(&e) {
                            edges.push(e);
                        }
                    }
                }
            }
        }
        let mut out: Vec<[Vertex; 4]> = Vec::new();
        let mut seen: Vec<[EdgeId; 4]> = Vec::new();
        for e in edges {
            for b in 1..=m {
                let Some(cyc) = crate::standard::knn_cycle_with(ix, h, e, b) else {
                    continue;
                };
                let key = sorted_key(&cyc);
                if !seen.contains(&key) {
                    seen.push(key);
                    out.push(cyc);
                }
            }
        }
        out
    }

    /// Checks one more swap against the exchange rules and records its new
    /// edges in `s.touched`. The caller truncates on rejection.
    fn admit(&self, s: &mut Search<'_>, cyc: &[Vertex; 4]) -> bool {
        let Some((c1, c2)) = self.h.two_colors(cyc) else { return false };
        if !self.is_knn_cycle(cyc) || !super::allowed_with(cyc, c1, c2, self.lists) {
            return false;
        }
        for e in super::cycle_edges(cyc) {
            if s.touched.iter().any(|t| t.0 == e) {
                continue;
            }
            let orig = self.color(e);
            if s.req.protects(e)
                || s.req.avoids(orig)
                || s.overloaded[orig]
                || (self.is_prescribed(e) && !s.req.may_recolor_prescribed(e))
            {
                return false;
            }
            s.touched.push((e, orig));
        }
        s.touched.len() <= EXCHANGE_BUDGET
    }
}

fn sorted_key(cyc: &[Vertex; 4]) -> [EdgeId; 4] {
    let mut k = super::cycle_edges(cyc);
    k.sort_unstable();
    k
}
