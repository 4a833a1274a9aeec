//! Random side-preserving vertex relabelings of the standard coloring,
//! rejection-sampled until the relabeled coloring meets the density
//! conditions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::density::{check_hprime_conditions_with, ConditionReport};
use crate::exec::{self, Strategy};
use crate::model::{CompleteGraphIndex, EdgeColoring, EdgeId, ListAssignment, ParameterSet, Vertex};

pub const DEFAULT_MAX_TRIES: usize = 1000;

/// `rho1[i]` is the image of `p(i + 1)`'s position on its side, likewise
/// `rho2` for the Q side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub rho1: Vec<usize>,
    pub rho2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RelabelError {
    #[error("relabeling is not a pair of permutations of 0..{0}")]
    NotBijective(usize),
    #[error("relabeling has order {got}, graph needs {want}")]
    WrongOrder { got: usize, want: usize },
    #[error("no relabeling passed after {tries} tries; best attempt #{best_try} failed {}", best.failure_count())]
    Exhausted {
        tries: usize,
        best_try: usize,
        best: Box<ConditionReport>,
    },
}

impl Relabeling {
    pub fn identity(n: usize) -> Relabeling {
        Relabeling {
            rho1: (0..n).collect(),
            rho2: (0..n).collect(),
        }
    }

    /// Fisher-Yates shuffles of both sides, P side first.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Relabeling {
        let mut r = Relabeling::identity(n);
        r.rho1.shuffle(rng);
        r.rho2.shuffle(rng);
        r
    }

    pub fn n(&self) -> usize {
        self.rho1.len()
    }

    pub fn validate(&self) -> Result<(), RelabelError> {
        let n = self.rho1.len();
        for side in [&self.rho1, &self.rho2] {
            let mut seen = vec![false; n];
            if side.len() != n {
                return Err(RelabelError::NotBijective(n));
            }
            for &x in side {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(RelabelError::NotBijective(n));
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Relabeling {
        let inv = |p: &[usize]| {
            let mut q = vec![0; p.len()];
            for (i, &x) in p.iter().enumerate() {
                q[x] = i;
            }
            q
        };
        Relabeling {
            rho1: inv(&self.rho1),
            rho2: inv(&self.rho2),
        }
    }

    #[inline]
    pub fn map_vertex(&self, n: usize, v: Vertex) -> Vertex {
        if v < n {
            self.rho1[v]
        } else {
            n + self.rho2[v - n]
        }
    }
}

/// `h′(ρ(u) ρ(v)) = h(uv)`.
pub fn apply_relabeling(h: &EdgeColoring, rho: &Relabeling) -> Result<EdgeColoring, RelabelError> {
    rho.validate()?;
    let g = h.graph();
    let n = rho.n();
    if g.order() != 2 * n {
        return Err(RelabelError::WrongOrder { got: n, want: g.order() / 2 });
    }
    let mut out = EdgeColoring::new(g.clone(), h.num_colors());
    for (e, c) in h.colored_edges() {
        let (u, v) = g.endpoints(e);
        let f = EdgeId::of(rho.map_vertex(n, u), rho.map_vertex(n, v));
        out.set(f, c).expect("relabeling a proper coloring stays proper");
    }
    Ok(out)
}

/// Accepted relabeling with its condition report.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub hprime: EdgeColoring,
    pub rho: Relabeling,
    /// Attempts used, counting the accepted one.
    pub tries: usize,
    pub report: ConditionReport,
}

/// Relabeling number `attempt` for `seed`: its own ChaCha8 stream.
pub fn relabeling_for(n: usize, seed: u64, attempt: usize) -> Relabeling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    Relabeling::random(n, &mut rng)
}

/// Tries relabelings `0..max_tries` of `h` and returns the first (lowest
/// attempt index) whose image passes every condition.
#[allow(clippy::too_many_arguments)]
pub fn sample_good_relabeling(
    index: &CompleteGraphIndex,
    h: &EdgeColoring,
    phi: &EdgeColoring,
    lists: &ListAssignment,
    params: &ParameterSet,
    seed: u64,
    max_tries: usize,
    strategy: Strategy,
) -> Result<Sampled, RelabelError> {
    sample_good_relabeling_from(index, h, phi, lists, params, seed, 0, max_tries, strategy)
}

/// As [`sample_good_relabeling`], over attempts `start..max_tries`.
#[allow(clippy::too_many_arguments)]
pub fn sample_good_relabeling_from(
    index: &CompleteGraphIndex,
    h: &EdgeColoring,
    phi: &EdgeColoring,
    lists: &ListAssignment,
    params: &ParameterSet,
    seed: u64,
    start: usize,
    max_tries: usize,
    strategy: Strategy,
) -> Result<Sampled, RelabelError> {
    let n = index.n();
    let chunk = rayon_chunk(strategy);
    let len = max_tries.max(1).saturating_sub(start).max(1);
    let attempt = |i: usize| {
        let rho = relabeling_for(n, seed, start + i);
        let hprime = apply_relabeling(h, &rho).expect("sampled relabelings are valid");
        let report = check_hprime_conditions_with(index, &hprime, phi, lists, params, Strategy::Sequential);
        if report.all_pass() {
            Ok((hprime, rho, report))
        } else {
            Err(report)
        }
    };
    let (hit, failures) = exec::first_success(strategy, len, chunk, attempt);
    match hit {
        Some((i, (hprime, rho, report))) => Ok(Sampled {
            hprime,
            rho,
            tries: start + i + 1,
            report,
        }),
        None => {
            let (best_try, best) = failures
                .into_iter()
                .enumerate()
                .min_by_key(|(i, r)| (r.failure_count(), *i))
                .expect("at least one attempt");
            Err(RelabelError::Exhausted {
                tries: len,
                best_try: start + best_try,
                best: Box::new(best),
            })
        }
    }
}

fn rayon_chunk(strategy: Strategy) -> usize {
    if strategy.is_parallel() {
        std::thread::available_parallelism().map_or(4, |p| p.get()) * 2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::standard_coloring;

    #[test]
    fn identity_and_inverse() {
        let ix = CompleteGraphIndex::new(6).unwrap();
        let h = standard_coloring(&ix);
        assert_eq!(apply_relabeling(&h, &Relabeling::identity(6)).unwrap(), h);
        let rho = relabeling_for(6, 7, 3);
        let there = apply_relabeling(&h, &rho).unwrap();
        assert_eq!(apply_relabeling(&there, &rho.inverse()).unwrap(), h);
    }

    #[test]
    fn swapping_two_p_vertices_moves_color() {
        let ix = CompleteGraphIndex::new(4).unwrap();
        let h = standard_coloring(&ix);
        let mut rho = Relabeling::identity(4);
        rho.rho1.swap(0, 1);
        let hp = apply_relabeling(&h, &rho).unwrap();
        assert_eq!(hp.raw(ix.edge(ix.p(2), ix.q(1))), 1);
    }

    #[test]
    fn rejects_bad_maps() {
        let ix = CompleteGraphIndex::new(4).unwrap();
        let h = standard_coloring(&ix);
        let bad = Relabeling {
            rho1: vec![0, 0, 1, 2],
            rho2: vec![0, 1, 2, 3],
        };
        assert!(apply_relabeling(&h, &bad).is_err());
        assert!(apply_relabeling(&h, &Relabeling::identity(3)).is_err());
    }

    #[test]
    fn empty_instance_first_try() {
        let ix = CompleteGraphIndex::new(8).unwrap();
        let h = standard_coloring(&ix);
        let phi = EdgeColoring::for_index(&ix);
        let l = ListAssignment::for_index(&ix);
        let p = ParameterSet::relaxed(8);
        let s = sample_good_relabeling(&ix, &h, &phi, &l, &p, 1, 1, Strategy::Sequential).unwrap();
        assert_eq!(s.tries, 1);
    }

    #[test]
    fn strategies_pick_same_attempt() {
        let ix = CompleteGraphIndex::new(6).unwrap();
        let h = standard_coloring(&ix);
        let mut phi = EdgeColoring::for_index(&ix);
        phi.set(ix.edge(0, 6), 3).unwrap();
        phi.set(ix.edge(1, 2), 2).unwrap();
        let mut l = ListAssignment::for_index(&ix);
        for e in [ix.edge(0, 7), ix.edge(2, 8), ix.edge(3, 4)] {
            l.insert(e, 1).unwrap();
        }
        let p = ParameterSet::relaxed(6);
        let a = sample_good_relabeling(&ix, &h, &phi, &l, &p, 11, 50, Strategy::Sequential);
        let b = sample_good_relabeling(&ix, &h, &phi, &l, &p, 11, 50, Strategy::Parallel);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.tries, b.tries);
                assert_eq!(a.rho, b.rho);
            }
            (Err(_), Err(_)) => {}
            _ => panic!("strategies disagree"),
        }
    }
}
