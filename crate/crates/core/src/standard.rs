//! The standard m-edge coloring of K_{2n} and strong 2-colored 4-cycles.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::exec::{self, Strategy};
use crate::model::{Color, CompleteGraphIndex, EdgeColoring, EdgeId, Vertex};

/// `x mod k` with the residue 0 mapped to `k`, so results lie in 1..=k.
#[inline]
pub fn mod1(x: i64, k: i64) -> i64 {
    let r = x.rem_euclid(k);
    if r == 0 {
        k
    } else {
        r
    }
}

/// Latin square on rows p_1..p_n, columns q_1..q_n, colors 1..n.
pub type Square = Vec<Vec<Color>>;

/// The even-order K_{n,n} pattern; `i`, `j` are 1-based.
pub fn even_entry(n: usize, i: usize, j: usize) -> Color {
    let r = (n / 2) as i64;
    let (i, j) = (i as i64, j as i64);
    let v = match (i <= r, j <= r) {
        (true, true) => mod1(j - i + 1, r),
        (false, false) => mod1(i - j + 1, r),
        (true, false) => mod1(j - i + 1, r) + r,
        (false, true) => mod1(i - j + 1, r) + r,
    };
    v as Color
}

pub fn even_square(n: usize) -> Square {
    debug_assert!(n % 2 == 0);
    (1..=n)
        .map(|i| (1..=n).map(|j| even_entry(n, i, j)).collect())
        .collect()
}

/// Clique color of p_i p_j (or q_i q_j); `i`, `j` are 1-based and distinct.
pub fn clique_entry(n: usize, i: usize, j: usize) -> Color {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let n_ = n as i64;
    let v = if n % 2 == 1 {
        mod1((lo + hi) as i64, n_) + n_
    } else if hi < n {
        mod1((lo + hi) as i64, n_ - 1) + n_
    } else {
        mod1(2 * lo as i64, n_ - 1) + n_
    };
    v as Color
}

/// One strong-cycle count per cell, with low colors 1..=floor(n/2).
pub fn square_strong_counts(sq: &Square) -> Vec<Vec<usize>> {
    let n = sq.len();
    let r = n / 2;
    // pos[i][c] = column of color c in row i; row_of[j][c] = row of c in column j.
    let mut pos = vec![vec![0; n + 1]; n];
    let mut row_of = vec![vec![0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            pos[i][sq[i][j]] = j;
            row_of[j][sq[i][j]] = i;
        }
    }
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let a = sq[i][j];
            let mut cnt = 0;
            for b in 1..=n {
                if b == a || (a <= r) == (b <= r) {
                    continue;
                }
                if sq[row_of[j][b]][pos[i][b]] == a {
                    cnt += 1;
                }
            }
            out[i][j] = cnt;
        }
    }
    out
}

pub fn square_deficiency(sq: &Square) -> usize {
    let r = sq.len() / 2;
    square_strong_counts(sq)
        .iter()
        .flatten()
        .filter(|&&c| c < r)
        .count()
}

/// Exchanges the two colors of an intercalate (2x2 subsquare).
fn switch(sq: &mut Square, i1: usize, i2: usize, j1: usize, j2: usize) {
    let a = sq[i1][j1];
    let b = sq[i1][j2];
    sq[i1][j1] = b;
    sq[i2][j2] = b;
    sq[i1][j2] = a;
    sq[i2][j1] = a;
}

fn intercalates(sq: &Square) -> Vec<(usize, usize, usize, usize)> {
    let n = sq.len();
    let mut out = Vec::new();
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            for j1 in 0..n {
                for j2 in j1 + 1..n {
                    if sq[i1][j1] == sq[i2][j2] && sq[i1][j2] == sq[i2][j1] {
                        out.push((i1, i2, j1, j2));
                    }
                }
            }
        }
    }
    out
}

/// Depth-first search for a transversal: one cell per row and column with
/// pairwise distinct colors. Returns the column chosen in each row.
fn find_transversal(sq: &Square, rng: &mut ChaCha8Rng, node_limit: usize) -> Option<Vec<usize>> {
    let n = sq.len();
    let mut col_used = vec![false; n];
    let mut color_used = vec![false; n + 1];
    let mut sol = vec![0; n];
    let orders: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    let mut nodes = 0;
    fn dfs(
        row: usize,
        sq: &Square,
        orders: &[Vec<usize>],
        col_used: &mut [bool],
        color_used: &mut [bool],
        sol: &mut [usize],
        nodes: &mut usize,
        limit: usize,
    ) -> bool {
        if row == sq.len() {
            return true;
        }
        *nodes += 1;
        if *nodes > limit {
            return false;
        }
        for &j in &orders[row] {
            let c = sq[row][j];
            if col_used[j] || color_used[c] {
                continue;
            }
            col_used[j] = true;
            color_used[c] = true;
            sol[row] = j;
            if dfs(row + 1, sq, orders, col_used, color_used, sol, nodes, limit) {
                return true;
            }
            col_used[j] = false;
            color_used[c] = false;
        }
        false
    }
    dfs(0, sq, &orders, &mut col_used, &mut color_used, &mut sol, &mut nodes, node_limit).then_some(sol)
}

/// Adds row and column n+1 using a transversal: each transversal cell takes
/// the new color, and its old color moves to the new row and column.
fn prolong(sq: &Square, tr: &[usize]) -> Square {
    let k = sq.len();
    let new = k + 1;
    let mut out = vec![vec![0; new]; new];
    for i in 0..k {
        out[i][..k].copy_from_slice(&sq[i]);
    }
    for i in 0..k {
        let j = tr[i];
        let c = sq[i][j];
        out[i][j] = new;
        out[i][k] = c;
        out[k][j] = c;
    }
    out[k][k] = new;
    out
}

const ODD_SEED: u64 = 0x5eed_0dd5;
const TRANSVERSAL_TRIES: usize = 8;
const SWITCH_TRIES: usize = 6;
const TRANSVERSAL_NODES: usize = 20_000;

/// K_{n,n} pattern for odd n: the even (n-1) pattern, switched on an
/// intercalate when (n-1)/2 is odd (those tables have no transversal), then
/// prolonged through a transversal; the best of a fixed, seeded set of
/// candidates wins.
pub fn odd_square(n: usize) -> Square {
    debug_assert!(n % 2 == 1);
    if n == 1 {
        return vec![vec![1]];
    }
    if n == 3 {
        return (1..=3)
            .map(|i| (1..=3).map(|j| mod1((i + j) as i64, 3) as Color).collect())
            .collect();
    }
    let base = even_square(n - 1);
    let r = (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(ODD_SEED ^ n as u64);
    let mut best: Option<(usize, Square)> = None;
    let try_base = |b: &Square, rng: &mut ChaCha8Rng, best: &mut Option<(usize, Square)>| {
        let mut found = false;
        for _ in 0..TRANSVERSAL_TRIES {
            if let Some(tr) = find_transversal(b, rng, TRANSVERSAL_NODES) {
                found = true;
                let sq = prolong(b, &tr);
                let d = square_deficiency(&sq);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    *best = Some((d, sq));
                }
            }
        }
        found
    };
    if r % 2 == 0 {
        try_base(&base, &mut rng, &mut best);
    } else {
        let mut usable = 0;
        for (i1, i2, j1, j2) in intercalates(&base) {
            let mut s = base.clone();
            switch(&mut s, i1, i2, j1, j2);
            if try_base(&s, &mut rng, &mut best) {
                usable += 1;
                if usable == SWITCH_TRIES {
                    break;
                }
            }
        }
    }
    match best {
        Some((_, s)) => s,
        None => {
            // No transversal among the switched tables (order 6 is the known
            // case): scramble with cycle switches until one appears, then
            // anneal, since the scrambled start has lost the base structure.
            let mut b = base;
            let start = loop {
                row_cycle_switch(&mut b, &mut rng);
                col_cycle_switch(&mut b, &mut rng);
                if let Some(tr) = find_transversal(&b, &mut rng, TRANSVERSAL_NODES) {
                    break prolong(&b, &tr);
                }
            };
            let iters = (ANNEAL_WORK / (n * n * n)).clamp(64, 20_000);
            anneal(start, &mut rng, iters)
        }
    }
}

const ANNEAL_WORK: usize = 2_000_000;

/// Switches the alternating cycle of rows `i`, `i2` through column `j`.
fn row_cycle_switch(sq: &mut Square, rng: &mut ChaCha8Rng) {
    let n = sq.len();
    let i = rng.gen_range(0..n);
    let i2 = (i + rng.gen_range(1..n)) % n;
    let j0 = rng.gen_range(0..n);
    let mut pos = vec![0; n + 1];
    for (j, &c) in sq[i].iter().enumerate() {
        pos[c] = j;
    }
    let mut j = j0;
    loop {
        let below = sq[i2][j];
        let above = sq[i][j];
        sq[i][j] = below;
        sq[i2][j] = above;
        j = pos[below];
        if j == j0 {
            break;
        }
    }
}

fn col_cycle_switch(sq: &mut Square, rng: &mut ChaCha8Rng) {
    let mut t = transpose(sq);
    row_cycle_switch(&mut t, rng);
    *sq = transpose(&t);
}

fn transpose(sq: &Square) -> Square {
    let n = sq.len();
    (0..n).map(|j| (0..n).map(|i| sq[i][j]).collect()).collect()
}

/// Metropolis descent on the deficient-cell count over cycle switches.
fn anneal(start: Square, rng: &mut ChaCha8Rng, iters: usize) -> Square {
    let mut cur = start;
    let mut cur_d = square_deficiency(&cur);
    let mut best = cur.clone();
    let mut best_d = cur_d;
    let mut temp = 3.0f64;
    let cool = (0.05f64 / 3.0).powf(1.0 / iters as f64);
    for _ in 0..iters {
        let mut cand = cur.clone();
        if rng.gen_bool(0.5) {
            row_cycle_switch(&mut cand, rng);
        } else {
            col_cycle_switch(&mut cand, rng);
        }
        let d = square_deficiency(&cand);
        if d <= cur_d || rng.gen_bool(((cur_d as f64 - d as f64) / temp).exp().min(1.0)) {
            cur = cand;
            cur_d = d;
            if d < best_d {
                best_d = d;
                best = cur.clone();
            }
        }
        temp *= cool;
    }
    best
}

/// The K_{n,n} pattern; odd orders are built once per process and cached.
pub fn knn_square(n: usize) -> Square {
    if n % 2 == 0 {
        return even_square(n);
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Square>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(sq) = cache.lock().expect("square cache").get(&n) {
        return sq.clone();
    }
    let sq = odd_square(n);
    cache.lock().expect("square cache").insert(n, sq.clone());
    sq
}

/// The standard coloring h of K_{2n}.
pub fn standard_coloring(index: &CompleteGraphIndex) -> EdgeColoring {
    let n = index.n();
    let mut h = EdgeColoring::for_index(index);
    let sq = knn_square(n);
    for i in 1..=n {
        for j in 1..=n {
            h.set(index.edge(index.p(i), index.q(j)), sq[i - 1][j - 1])
                .expect("latin square gives a proper coloring");
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let c = clique_entry(n, i, j);
            h.set(index.edge(index.p(i), index.p(j)), c)
                .expect("clique formula is proper");
            h.set(index.edge(index.q(i), index.q(j)), c)
                .expect("clique formula is proper");
        }
    }
    h
}

/// A 2-colored 4-cycle `u v z t` in K_{n,n}; `uv`, `zt` carry `colors.0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrongCycle {
    pub vertices: [Vertex; 4],
    pub edges: [EdgeId; 4],
    pub colors: (Color, Color),
}

impl StrongCycle {
    /// Edge ids sorted, for duplicate detection.
    pub fn key(&self) -> [EdgeId; 4] {
        let mut k = self.edges;
        k.sort();
        k
    }
}

/// The 2-colored 4-cycle through `e` using color `b` at both endpoints,
/// restricted to K_{n,n}. Returns `[u, v, y, x]` where `e = uv`.
#[inline]
pub fn knn_cycle_with(index: &CompleteGraphIndex, h: &EdgeColoring, e: EdgeId, b: Color) -> Option<[Vertex; 4]> {
    let (u, v) = index.endpoints(e);
    let a = h.raw(e);
    if a == 0 || a == b {
        return None;
    }
    let x = h.neighbor(u, b)?;
    let y = h.neighbor(v, b)?;
    if x == v || y == u || x == y {
        return None;
    }
    if index.side(x) == index.side(u) || index.side(y) == index.side(v) {
        return None;
    }
    if h.raw(EdgeId::of(x, y)) != a {
        return None;
    }
    Some([u, v, y, x])
}

/// Is the pair of colors strong (exactly one in 1..=floor(n/2))?
#[inline]
pub fn is_strong_pair(n: usize, a: Color, b: Color) -> bool {
    let r = n / 2;
    (a <= r) != (b <= r)
}

pub fn strong_cycles_through(index: &CompleteGraphIndex, h: &EdgeColoring, e: EdgeId) -> Result<Vec<StrongCycle>, ModelError> {
    if !index.graph().contains(e) {
        return Err(ModelError::InvalidEdge(e.0));
    }
    if !index.is_knn(e) {
        return Err(ModelError::Malformed(format!("{e} is not a K_{{n,n}} edge")));
    }
    let n = index.n();
    let a = h.raw(e);
    let mut out = Vec::new();
    for b in 1..=n {
        if b == a || !is_strong_pair(n, a, b) {
            continue;
        }
        if let Some(cyc) = knn_cycle_with(index, h, e, b) {
            let [u, v, y, x] = cyc;
            out.push(StrongCycle {
                vertices: cyc,
                edges: [EdgeId::of(u, v), EdgeId::of(v, y), EdgeId::of(y, x), EdgeId::of(x, u)],
                colors: (a, b),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub n: usize,
    pub threshold: usize,
    /// `(edge, strong-cycle count)` for every K_{n,n} edge, ascending id.
    pub counts: Vec<(EdgeId, usize)>,
    pub deficient: usize,
}

impl CensusReport {
    pub fn min_count(&self) -> usize {
        self.counts.iter().map(|c| c.1).min().unwrap_or(0)
    }

    pub fn max_count(&self) -> usize {
        self.counts.iter().map(|c| c.1).max().unwrap_or(0)
    }
}

pub fn verify_strong_cycle_census(index: &CompleteGraphIndex, h: &EdgeColoring) -> CensusReport {
    census_with(index, h, index.n() / 2, Strategy::Sequential, |_| true)
}

/// Census counting only cycles accepted by `keep`, against `threshold`.
pub fn census_with<F>(index: &CompleteGraphIndex, h: &EdgeColoring, threshold: usize, strategy: Strategy, keep: F) -> CensusReport
where
    F: Fn(&[Vertex; 4]) -> bool + Sync + Send,
{
    let mut edges: Vec<EdgeId> = index.knn_edges().collect();
    edges.sort();
    let n = index.n();
    let counts = exec::map_slice(strategy, &edges, |&e| {
        let a = h.raw(e);
        let c = (1..=n)
            .filter(|&b| b != a && is_strong_pair(n, a, b))
            .filter_map(|b| knn_cycle_with(index, h, e, b))
            .filter(|cyc| keep(cyc))
            .count();
        (e, c)
    });
    let deficient = counts.iter().filter(|c| c.1 < threshold).count();
    CensusReport {
        n,
        threshold,
        counts,
        deficient,
    }
}
