//! Independent recount oracles shared by the integration tests. Nothing here
//! calls the checkers under test; only the plain data types are used.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use edge_extend::model::{Color, CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet, Vertex};
use edge_extend::oracle::Instance;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Colors as a plain vector indexed by edge id, 0 for uncolored.
pub fn colors_of(h: &EdgeColoring) -> Vec<Color> {
    h.graph().edges().map(|e| h.get(e).unwrap_or(0)).collect()
}

pub fn edge_ends(e: usize) -> (Vertex, Vertex) {
    // Inverse of b(b-1)/2 + a with a < b.
    let mut b = 1;
    while (b + 1) * b / 2 <= e {
        b += 1;
    }
    (e - b * (b - 1) / 2, b)
}

/// Every vertex sees each color at most once. Uncolored edges are ignored.
pub fn is_proper(order: usize, colors: &[Color]) -> bool {
    let mut seen = HashSet::new();
    for (e, &c) in colors.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (u, v) = edge_ends(e);
        assert!(v < order);
        if !seen.insert((u, c)) || !seen.insert((v, c)) {
            return false;
        }
    }
    true
}

pub fn is_total(colors: &[Color]) -> bool {
    colors.iter().all(|&c| c != 0)
}

/// Colors of a 4-cycle `a b c d` if it alternates two distinct colors.
pub fn alternating(colors: &[Color], cyc: &[Vertex; 4]) -> Option<(Color, Color)> {
    let [a, b, c, d] = *cyc;
    let set: BTreeSet<_> = cyc.iter().collect();
    if set.len() != 4 {
        return None;
    }
    let col = |x: Vertex, y: Vertex| colors[EdgeId::of(x, y).0];
    let (c1, c2) = (col(a, b), col(b, c));
    (c1 != 0 && c2 != 0 && c1 != c2 && col(c, d) == c1 && col(d, a) == c2).then_some((c1, c2))
}

/// Swap by hand, then decide: the result must be proper and no cycle edge
/// may land on a listed color.
pub fn swap_then_check(order: usize, colors: &[Color], cyc: &[Vertex; 4], lists: &ListAssignment) -> Option<Vec<Color>> {
    let (c1, c2) = alternating(colors, cyc)?;
    let mut out = colors.to_vec();
    let [a, b, c, d] = *cyc;
    for (x, y, now) in [(a, b, c2), (b, c, c1), (c, d, c2), (d, a, c1)] {
        let e = EdgeId::of(x, y);
        out[e.0] = now;
        if lists.list(e).contains(&now) {
            return None;
        }
    }
    is_proper(order, &out).then_some(out)
}

/// Strong 2-colored 4-cycles through the K_{n,n} edge `e` by enumerating
/// every choice of the two opposite vertices.
pub fn strong_count(ix: &CompleteGraphIndex, colors: &[Color], e: EdgeId, lists: Option<&ListAssignment>) -> usize {
    let n = ix.n();
    let r = n / 2;
    let (p, q) = ix.knn_endpoints(e);
    let mut count = 0;
    for p2 in 0..n {
        for q2 in n..2 * n {
            if p2 == p || q2 == q {
                continue;
            }
            let cyc = [p, q, p2, q2];
            let Some((x, y)) = alternating(colors, &cyc) else { continue };
            let (x_low, y_low) = (x <= r, y <= r);
            if x_low == y_low {
                continue;
            }
            if let Some(l) = lists {
                if swap_list_hit(&cyc, colors, l) {
                    continue;
                }
            }
            count += 1;
        }
    }
    count
}

fn swap_list_hit(cyc: &[Vertex; 4], colors: &[Color], lists: &ListAssignment) -> bool {
    let [a, b, c, d] = *cyc;
    let (c1, c2) = (colors[EdgeId::of(a, b).0], colors[EdgeId::of(b, c).0]);
    [(a, b, c2), (b, c, c1), (c, d, c2), (d, a, c1)]
        .iter()
        .any(|&(x, y, now)| lists.list(EdgeId::of(x, y)).contains(&now))
}

pub fn deficient_naive(ix: &CompleteGraphIndex, colors: &[Color], threshold: usize, lists: Option<&ListAssignment>) -> usize {
    ix.knn_edges()
        .filter(|&e| strong_count(ix, colors, e, lists) < threshold)
        .count()
}

/// Pass/fail of each post-relabeling condition, recounted edge by edge, in
/// the order a, b, c, d, e, f, g, h, i, a', b', c', palette.
pub fn conditions_naive(ix: &CompleteGraphIndex, h: &EdgeColoring, phi: &EdgeColoring, lists: &ListAssignment, params: &ParameterSet) -> Vec<bool> {
    let n = ix.n();
    let m = ix.m();
    let p = 2 * n;
    let cols = colors_of(h);
    let pre = colors_of(phi);
    let c = params.c_n;
    let cp = params.cprime_n;
    let edges: Vec<EdgeId> = (0..cols.len()).map(EdgeId).collect();
    let part = |e: EdgeId| {
        let (u, v) = ix.endpoints(e);
        match (u < n, v < n) {
            (true, true) => 1,
            (false, false) => 2,
            _ => 0,
        }
    };
    let conflict = |e: EdgeId| lists.list(e).contains(&cols[e.0]);
    let at = |v: Vertex, e: EdgeId| {
        let (a, b) = ix.endpoints(e);
        a == v || b == v
    };
    let count = |f: &dyn Fn(EdgeId) -> bool| edges.iter().filter(|&&e| f(e)).count();

    let mut out = Vec::new();
    let deficient = deficient_naive(ix, &cols, params.strong_threshold(), Some(lists));
    out.push(deficient <= 3 * n + 7);
    out.push((0..p).all(|v| count(&|e| part(e) == 0 && at(v, e) && conflict(e)) <= cp));
    out.push((1..=n).all(|k| count(&|e| part(e) == 0 && cols[e.0] == k && conflict(e)) <= c));
    out.push((1..=n).all(|k| count(&|e| part(e) == 0 && cols[e.0] == k && pre[e.0] != 0) <= c));
    out.push((1..=m).all(|l| (1..=n).all(|k| count(&|e| part(e) == 0 && cols[e.0] == k && lists.list(e).contains(&l)) <= c)));
    out.push((0..p).all(|v| count(&|e| part(e) != 0 && at(v, e) && conflict(e)) <= cp));
    let per_clique = |f: &dyn Fn(EdgeId, Color) -> bool| {
        [1, 2].iter().all(|&side| (n + 1..=m).all(|k| count(&|e| part(e) == side && cols[e.0] == k && f(e, k)) <= c))
    };
    out.push(per_clique(&|e, _| conflict(e)));
    out.push(per_clique(&|e, _| pre[e.0] != 0));
    out.push((1..=m).all(|l| per_clique(&|e, _| lists.list(e).contains(&l))));
    out.push((0..p).all(|v| count(&|e| at(v, e) && conflict(e)) <= 2 * cp));
    let bound = |k: Color| if k <= n { c } else { 2 * c };
    out.push((1..=m).all(|k| {
        count(&|e| cols[e.0] == k && conflict(e)) <= bound(k) && count(&|e| cols[e.0] == k && pre[e.0] != 0) <= bound(k)
    }));
    out.push((1..=m).all(|l| (1..=m).all(|k| count(&|e| cols[e.0] == k && lists.list(e).contains(&l)) <= bound(k))));
    out.push(edges.iter().filter(|e| pre[e.0] != 0).all(|&e| {
        let (u, v) = ix.endpoints(e);
        [u, v].iter().all(|&w| edges.iter().any(|&f| at(w, f) && cols[f.0] == pre[e.0]))
    }));
    out
}

/// Random proper partial precoloring with `count` edges and up to
/// `lists` single-color lists, none listing an edge's own precolor.
pub fn random_instance(order: usize, count: usize, lists: usize, rng: &mut impl Rng) -> Instance {
    let mut inst = Instance::empty(order).unwrap();
    let t = inst.colors;
    let edges: Vec<EdgeId> = inst.graph().edges().collect();
    let mut placed = 0;
    for _ in 0..count * 20 {
        if placed == count {
            break;
        }
        let e = *edges.choose(rng).unwrap();
        let c = rng.gen_range(1..=t);
        if inst.phi.get(e).is_none() && inst.phi.set(e, c).is_ok() {
            placed += 1;
        }
    }
    let mut listed = 0;
    for _ in 0..lists * 20 {
        if listed == lists {
            break;
        }
        let e = *edges.choose(rng).unwrap();
        let c = rng.gen_range(1..=t);
        if inst.phi.get(e) == Some(c) || !inst.lists.list(e).is_empty() {
            continue;
        }
        inst.lists.insert(e, c).unwrap();
        listed += 1;
    }
    inst
}

/// Independent check of a final coloring against an instance.
pub fn solves(inst: &Instance, colors: &[Color]) -> bool {
    is_total(colors)
        && colors.iter().all(|&c| c <= inst.colors)
        && is_proper(inst.order, colors)
        && inst.phi.colored_edges().all(|(e, c)| colors[e.0] == c)
        && colors.iter().enumerate().all(|(e, &c)| !inst.lists.list(EdgeId(e)).contains(&c))
}

/// Every 2-colored 4-cycle of a total coloring, one orientation each,
/// found by walking color pairs from each vertex.
pub fn two_colored_cycles(order: usize, colors: &[Color]) -> Vec<[Vertex; 4]> {
    let t = colors.iter().copied().max().unwrap_or(0);
    let mut nbr = vec![usize::MAX; order * (t + 1)];
    for (e, &c) in colors.iter().enumerate() {
        if c != 0 {
            let (u, v) = edge_ends(e);
            nbr[u * (t + 1) + c] = v;
            nbr[v * (t + 1) + c] = u;
        }
    }
    let step = |v: Vertex, c: Color| nbr[v * (t + 1) + c];
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in 0..order {
        for c1 in 1..=t {
            for c2 in c1 + 1..=t {
                let b = step(a, c1);
                if b == usize::MAX {
                    continue;
                }
                let c = step(b, c2);
                if c == usize::MAX || c == a {
                    continue;
                }
                let d = step(c, c1);
                if d == usize::MAX || d == b || step(d, c2) != a {
                    continue;
                }
                let mut key = [EdgeId::of(a, b), EdgeId::of(b, c), EdgeId::of(c, d), EdgeId::of(d, a)];
                key.sort();
                if seen.insert(key) {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Breadth-first search over allowed swaps from `start`, up to `depth`
/// swaps, stopping at the first state satisfying `goal`. Returns the number
/// of swaps needed.
pub fn bfs_swaps(order: usize, start: &[Color], lists: &ListAssignment, depth: usize, goal: &dyn Fn(&[Color]) -> bool) -> Option<usize> {
    let mut seen: HashSet<Vec<Color>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back((start.to_vec(), 0));
    while let Some((s, d)) = queue.pop_front() {
        if goal(&s) {
            return Some(d);
        }
        if d == depth {
            continue;
        }
        for cyc in two_colored_cycles(order, &s) {
            if let Some(next) = swap_then_check(order, &s, &cyc, lists) {
                if seen.insert(next.clone()) {
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    None
}

/// Random distinct indices in `0..len`.
pub fn sample<R: Rng>(rng: &mut R, len: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, len, k.min(len)).into_vec()
}

/// Constraints of one operation call, as the caller sees them.
#[derive(Clone, Debug, Default)]
pub struct OpSpec {
    pub budget: usize,
    pub avoided: Vec<Color>,
    pub protected: Vec<EdgeId>,
    pub allowed_prescribed: Vec<EdgeId>,
    /// Only K_{n,n} edges may be swapped.
    pub knn_only: bool,
}

/// Requested: some other edge at an endpoint is prescribed with `c`.
pub fn requested(phi: &[Color], e: EdgeId, c: Color) -> bool {
    let (u, v) = edge_ends(e.0);
    phi.iter().enumerate().any(|(f, &pc)| {
        if pc != c || f == e.0 {
            return false;
        }
        let (a, b) = edge_ends(f);
        a == u || a == v || b == u || b == v
    })
}

/// Replays `swaps` on `before` one by one and checks every contract of a
/// successful operation. Returns the number of distinct edges swapped.
pub fn check_op(
    ix: &CompleteGraphIndex,
    lists: &ListAssignment,
    phi: &[Color],
    before: &[Color],
    after: &[Color],
    swaps: &[[Vertex; 4]],
    spec: &OpSpec,
) -> Result<usize, String> {
    let order = 2 * ix.n();
    let mut cur = before.to_vec();
    let mut touched = BTreeSet::new();
    for cyc in swaps {
        cur = swap_then_check(order, &cur, cyc, lists).ok_or_else(|| format!("swap {cyc:?} not allowed on replay"))?;
        let [a, b, c, d] = *cyc;
        for (x, y) in [(a, b), (b, c), (c, d), (d, a)] {
            touched.insert(EdgeId::of(x, y));
        }
    }
    if cur != after {
        return Err("replay does not reproduce the result".into());
    }
    if !is_total(after) || !is_proper(order, after) {
        return Err("result is not a proper total coloring".into());
    }
    if touched.len() > spec.budget {
        return Err(format!("{} edges swapped, budget {}", touched.len(), spec.budget));
    }
    for &e in &touched {
        let (u, v) = ix.endpoints(e);
        if spec.knn_only && (u < ix.n()) == (v < ix.n()) {
            return Err(format!("{e} outside K_{{n,n}}"));
        }
        if spec.avoided.contains(&before[e.0]) {
            return Err(format!("{e} carried avoided color {}", before[e.0]));
        }
        if spec.protected.contains(&e) {
            return Err(format!("protected {e} swapped"));
        }
        if phi[e.0] != 0 && !spec.allowed_prescribed.contains(&e) {
            return Err(format!("prescribed {e} swapped"));
        }
    }
    for e in ix.graph().edges() {
        let listed = |c: Color| lists.list(e).contains(&c);
        if listed(after[e.0]) && !listed(before[e.0]) {
            return Err(format!("new conflict {e}"));
        }
        if !ix.is_knn(e) && requested(phi, e, after[e.0]) && !requested(phi, e, before[e.0]) {
            return Err(format!("new requested clique edge {e}"));
        }
    }
    Ok(touched.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    Exchange,
    Pull,
    Push,
    PullHigh,
    Place,
    Correct,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzStats {
    pub calls: usize,
    /// Successes per operation in `Op` order.
    pub ok: [usize; 6],
    pub tried: [usize; 6],
    pub max_touched: [usize; 6],
    pub violations: Vec<String>,
}

fn correct_budget(ix: &CompleteGraphIndex, e: EdgeId, c: Color) -> usize {
    match (ix.is_knn(e), c <= ix.n()) {
        (true, true) => 69,
        (true, false) => 136,
        (false, true) => 139,
        (false, false) => 205,
    }
}

/// Runs `calls` random operations on engines over random instances with
/// n in 4..=8 and checks each against [`check_op`].
pub fn op_fuzz(seed: u64, calls: usize, per_engine: usize) -> FuzzStats {
    use edge_extend::permute::{apply_relabeling, relabeling_for};
    use edge_extend::standard::standard_coloring;
    use edge_extend::swap::{SwapEngine, SwapRequest};
    use edge_extend::model::Side;

    let mut r = rng(seed);
    let mut st = FuzzStats::default();
    let mut round = 0u64;
    while st.calls < calls {
        round += 1;
        let n = r.gen_range(4..=8);
        let ix = CompleteGraphIndex::new(n).unwrap();
        let m = ix.m();
        let h = apply_relabeling(&standard_coloring(&ix), &relabeling_for(n, seed ^ round, 0)).unwrap();
        let mut phi = EdgeColoring::for_index(&ix);
        for k in sample(&mut r, ix.edge_count(), n / 2 + 1) {
            let e = EdgeId(k);
            let c = if r.gen_bool(0.5) { h.raw(e) } else { r.gen_range(1..=m) };
            let _ = phi.set(e, c);
        }
        let mut lists = ListAssignment::for_index(&ix);
        for k in sample(&mut r, ix.edge_count(), n) {
            let e = EdgeId(k);
            let c = r.gen_range(1..=m);
            if phi.get(e) != Some(c) {
                lists.insert(e, c).unwrap();
            }
        }
        let params = ParameterSet::relaxed(n);
        let pre = colors_of(&phi);
        let mut eng = SwapEngine::new(&ix, h, &lists, &phi, &params, &[]);
        for _ in 0..per_engine {
            if st.calls >= calls {
                break;
            }
            let op = [Op::Exchange, Op::Pull, Op::Push, Op::PullHigh, Op::Place, Op::Correct][r.gen_range(0..6)];
            let cur = colors_of(eng.coloring());
            let knn: Vec<EdgeId> = ix.knn_edges().collect();
            let clique: Vec<EdgeId> = ix.graph().edges().filter(|&e| !ix.is_knn(e)).collect();
            // Pick arguments; `own` are the colors the operation moves.
            let mut spec = OpSpec::default();
            let mut own: Vec<Color> = Vec::new();
            let mut anchors: Vec<EdgeId> = Vec::new();
            enum Args {
                Two(EdgeId, EdgeId),
                To(EdgeId, Vertex),
                Push(EdgeId, Vertex, Vertex),
                Place(Color, Side),
                Fix(EdgeId),
            }
            let args = match op {
                Op::Exchange => {
                    let u = r.gen_range(0..2 * n);
                    let others: Vec<Vertex> = if u < n { (n..2 * n).collect() } else { (0..n).collect() };
                    let ab = sample(&mut r, n, 2);
                    let (f, s) = (EdgeId::of(u, others[ab[0]]), EdgeId::of(u, others[ab[1]]));
                    own = vec![cur[f.0], cur[s.0]];
                    anchors = vec![f, s];
                    spec.budget = 16;
                    spec.knn_only = true;
                    Args::Two(f, s)
                }
                Op::Pull | Op::PullHigh => {
                    let want_low = op == Op::Pull;
                    let pool: Vec<EdgeId> = knn.iter().copied().filter(|&e| (cur[e.0] <= n) == want_low).collect();
                    if pool.is_empty() {
                        continue;
                    }
                    let src = pool[r.gen_range(0..pool.len())];
                    let (a, b) = ix.knn_endpoints(src);
                    let (u1, u2) = if r.gen_bool(0.5) { (a, b) } else { (b, a) };
                    let side: Vec<Vertex> = if u2 < n { (0..n).collect() } else { (n..2 * n).collect() };
                    let v2 = side[r.gen_range(0..n)];
                    let _ = u1;
                    own = vec![cur[src.0]];
                    anchors = vec![src];
                    if pre[src.0] != 0 && r.gen_bool(0.7) {
                        spec.allowed_prescribed.push(src);
                    }
                    spec.budget = if want_low { 34 } else { 67 };
                    spec.knn_only = want_low;
                    Args::To(src, v2)
                }
                Op::Push => {
                    let pool: Vec<EdgeId> = clique.iter().copied().filter(|&e| cur[e.0] > n).collect();
                    if pool.is_empty() {
                        continue;
                    }
                    let src = pool[r.gen_range(0..pool.len())];
                    let (a, b) = ix.endpoints(src);
                    let anchor = if r.gen_bool(0.5) { a } else { b };
                    let target = if anchor < n { r.gen_range(n..2 * n) } else { r.gen_range(0..n) };
                    own = vec![cur[src.0]];
                    anchors = vec![src];
                    if pre[src.0] != 0 && r.gen_bool(0.7) {
                        spec.allowed_prescribed.push(src);
                    }
                    spec.budget = 34;
                    Args::Push(src, anchor, target)
                }
                Op::Place => {
                    let c = r.gen_range(1..=n);
                    own = vec![c];
                    spec.budget = 70;
                    Args::Place(c, if r.gen_bool(0.5) { Side::P } else { Side::Q })
                }
                Op::Correct => {
                    let pool: Vec<EdgeId> = (0..cur.len()).map(EdgeId).filter(|e| pre[e.0] != 0 && pre[e.0] != cur[e.0]).collect();
                    if pool.is_empty() {
                        continue;
                    }
                    let uv = pool[r.gen_range(0..pool.len())];
                    let c2 = pre[uv.0];
                    let (u, v) = ix.endpoints(uv);
                    spec.budget = correct_budget(&ix, uv, c2);
                    spec.allowed_prescribed = vec![uv];
                    for w in [u, v] {
                        if let Some(f) = (0..cur.len()).find(|&f| {
                            let (a, b) = edge_ends(f);
                            (a == w || b == w) && cur[f] == c2
                        }) {
                            spec.allowed_prescribed.push(EdgeId(f));
                        }
                    }
                    Args::Fix(uv)
                }
            };
            if op != Op::Correct {
                if r.gen_bool(0.5) {
                    for _ in 0..r.gen_range(1..=2) {
                        let c = r.gen_range(1..=m);
                        if !own.contains(&c) && !spec.avoided.contains(&c) {
                            spec.avoided.push(c);
                        }
                    }
                }
                if r.gen_bool(0.5) {
                    let e = EdgeId(r.gen_range(0..cur.len()));
                    if !anchors.contains(&e) {
                        spec.protected.push(e);
                    }
                }
            }
            let req = SwapRequest {
                avoided: spec.avoided.clone(),
                protected: spec.protected.clone(),
                allowed_prescribed: spec.allowed_prescribed.clone(),
            };
            let fixed = match args {
                Args::Fix(uv) => Some(uv),
                _ => None,
            };
            let cp = eng.checkpoint();
            let res: Result<(), String> = match args {
                Args::Two(f, s) => eng.exchange_adjacent_knn(f, s, &req).map(|_| ()).map_err(|e| e.to_string()),
                Args::To(src, v2) if op == Op::Pull => eng.pull_color_to_neighbor_knn(src, v2, &req).map(|_| ()).map_err(|e| e.to_string()),
                Args::To(src, v2) => eng.pull_high_color_along_knn(src, v2, &req).map(|_| ()).map_err(|e| e.to_string()),
                Args::Push(src, a, t) => eng.push_clique_color_to_knn(src, a, t, &req).map(|_| ()).map_err(|e| e.to_string()),
                Args::Place(c, side) => eng.place_low_color_in_clique(c, side, &req, &|_, _| true).map(|_| ()).map_err(|e| e.to_string()),
                Args::Fix(uv) => eng.correct_edge(uv).map(|_| ()).map_err(|e| e.to_string()),
            };
            st.calls += 1;
            let k = op as usize;
            st.tried[k] += 1;
            let after = colors_of(eng.coloring());
            match res {
                Ok(()) => {
                    st.ok[k] += 1;
                    let swaps: Vec<[Vertex; 4]> = eng.trace().records()[cp..].iter().map(|s| s.cycle).collect();
                    match check_op(&ix, &lists, &pre, &cur, &after, &swaps, &spec) {
                        Ok(t) => st.max_touched[k] = st.max_touched[k].max(t),
                        Err(why) => st.violations.push(format!("{op:?} n={n}: {why}")),
                    }
                    if let Some(uv) = fixed {
                        if after[uv.0] != pre[uv.0] {
                            st.violations.push(format!("correct left {uv} at {}", after[uv.0]));
                        }
                    }
                }
                Err(_) => {
                    if after != cur || eng.checkpoint() != cp {
                        st.violations.push(format!("{op:?} n={n}: failed call mutated the coloring"));
                    }
                }
            }
            if let Err(why) = eng.self_check() {
                st.violations.push(format!("{op:?} n={n}: trace recount: {why}"));
            }
        }
    }
    st
}

/// Replays a pipeline solution from h′ and recounts its accounting: the swap
/// log reproduces the output, every correction stays within its case budget
/// and works on the earliest pending phase, and the stats match a recount.
pub fn audit_solution(sol: &edge_extend::orchestrator::Solution, params: &ParameterSet) -> Result<(), String> {
    use edge_extend::orchestrator::{check_bounds, Phase};
    use edge_extend::swap::cycle_edges;

    let ix = CompleteGraphIndex::new(params.n).map_err(|e| e.to_string())?;
    let (Some(hp), Some(pp), Some(trace)) = (&sol.hprime, &sol.phi_prime, &sol.trace) else {
        return Err("not a pipeline solution".into());
    };
    let order = 2 * params.n;
    let mut cur = colors_of(hp);
    let pending = |cur: &[Color]| -> Vec<(Phase, EdgeId)> {
        let mut v: Vec<(Phase, EdgeId)> = pp
            .colored_edges()
            .filter(|&(e, c)| cur[e.0] != c)
            .map(|(e, c)| (Phase::of(&ix, e, c), e))
            .collect();
        v.sort();
        v
    };
    let st = &sol.stats;
    if pending(&cur).len() != st.queue_len {
        return Err(format!("queue length {} recounted as {}", st.queue_len, pending(&cur).len()));
    }
    let records = trace.records();
    if records.len() != st.swaps || st.corrections.iter().map(|c| c.swaps).sum::<usize>() != st.swaps {
        return Err("swap totals disagree with the log".into());
    }
    let mut touched = vec![false; cur.len()];
    let mut at = 0;
    for step in &st.corrections {
        let now = pending(&cur);
        let Some(&(first, _)) = now.first() else {
            return Err("correction with nothing pending".into());
        };
        if step.phase != first || !now.contains(&(step.phase, step.edge)) {
            return Err(format!("{} corrected in phase {} while phase {} was pending", step.edge, step.phase.number(), first.number()));
        }
        let before = cur.clone();
        for r in &records[at..at + step.swaps] {
            let Some(cols) = alternating(&cur, &r.cycle) else {
                return Err(format!("logged cycle {:?} is not 2-colored", r.cycle));
            };
            if cols != r.colors {
                return Err(format!("logged colors {:?} disagree with {:?}", r.colors, cols));
            }
            for e in cycle_edges(&r.cycle) {
                cur[e.0] = if cur[e.0] == cols.0 { cols.1 } else { cols.0 };
                touched[e.0] = true;
            }
        }
        at += step.swaps;
        if cur[step.edge.0] != pp.raw(step.edge) {
            return Err(format!("{} not corrected", step.edge));
        }
        let changed = before.iter().zip(&cur).filter(|(a, b)| a != b).count();
        if changed > step.case.budget() || step.touched > step.case.budget() {
            return Err(format!("case {} changed {changed} edges, touched {}", step.case.number(), step.touched));
        }
        if !is_proper(order, &cur) {
            return Err("improper after a correction".into());
        }
    }
    if !pending(&cur).is_empty() {
        return Err("edges left mis-colored".into());
    }
    // Odd orders restrict to a prefix of the edge ids.
    let out = colors_of(&sol.coloring);
    if cur[..out.len()] != out[..] {
        return Err("replayed log does not reproduce the output".into());
    }
    let disturbed: Vec<usize> = (0..cur.len()).filter(|&e| touched[e] || trace.is_baseline(EdgeId(e))).collect();
    let swapped = touched.iter().filter(|&&x| x).count();
    let mut by_color = vec![0usize; ix.m() + 1];
    for &e in &disturbed {
        by_color[cur[e]] += 1;
    }
    let max_color = by_color.iter().copied().max().unwrap_or(0);
    if (disturbed.len(), swapped, max_color) != (st.disturbed, st.swapped_edges, st.max_color_disturbed) {
        return Err(format!(
            "disturbed/swapped/max-color {:?} recounted as {:?}",
            (st.disturbed, st.swapped_edges, st.max_color_disturbed),
            (disturbed.len(), swapped, max_color)
        ));
    }
    if st.baseline != trace.baseline_len() {
        return Err("baseline size disagrees".into());
    }
    trace.recount(&to_coloring(hp, &cur))?;
    if swapped > 205 * st.queue_len {
        return Err(format!("{swapped} swapped edges exceed 205 q"));
    }
    if st.queue_len > 2 * params.n * (params.alpha_m() + params.c_n) {
        return Err(format!("q = {} exceeds 2n(am + c(n))", st.queue_len));
    }
    // Bound failures under the relaxed preset surface as warnings.
    match check_bounds(params, st) {
        Ok(()) if st.warnings.is_empty() => Ok(()),
        Err(w) if st.warnings.contains(&w) => Ok(()),
        other => Err(format!("bound check {other:?} vs warnings {:?}", st.warnings)),
    }
}

/// A proper assignment as a coloring on the graph of `like`.
pub fn to_coloring(like: &EdgeColoring, colors: &[Color]) -> EdgeColoring {
    let mut out = EdgeColoring::new(like.graph().clone(), like.num_colors());
    for (e, &c) in colors.iter().enumerate() {
        if c != 0 {
            out.set(EdgeId(e), c).expect("proper assignment");
        }
    }
    out
}
