//! Data-parallel helpers. With the `parallel` feature off every strategy
//! runs sequentially; results never depend on the strategy.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether work is actually spread over threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// `(0..len).map(f).collect()`, possibly in parallel, order preserved.
pub fn map_range<T, F>(strategy: Strategy, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..len).map(f).collect()
}

/// Maps every item of a slice, order preserved.
pub fn map_slice<S, T, F>(strategy: Strategy, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_range(strategy, items.len(), |i| f(&items[i]))
}

/// Evaluates `f(0), f(1), ...` up to `len` and returns the lowest index whose
/// result is `Ok`, along with every `Err` before it. Work proceeds in chunks
/// so a parallel run evaluates at most one chunk past the winner.
pub fn first_success<T, E, F>(strategy: Strategy, len: usize, chunk: usize, f: F) -> (Option<(usize, T)>, Vec<E>)
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    let chunk = if strategy.is_parallel() { chunk.max(1) } else { 1 };
    let mut failures = Vec::new();
    let mut start = 0;
    while start < len {
        let end = (start + chunk).min(len);
        let batch = map_range(strategy, end - start, |i| f(start + i));
        for (i, r) in batch.into_iter().enumerate() {
            match r {
                Ok(t) => return (Some((start + i, t)), failures),
                Err(e) => failures.push(e),
            }
        }
        start = end;
    }
    (None, failures)
}
