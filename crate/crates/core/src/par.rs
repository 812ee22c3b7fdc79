//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! global pool. Without it, or with [`Exec::Sequential`], the same closures run
//! on the calling thread. Results are always returned in input order so both
//! paths produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch of independent work items is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential evaluation when the `parallel` feature is off.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Splits `0..total` into contiguous chunks, maps each chunk to a vector of
/// results and concatenates them in index order.
pub fn flat_map_chunks<R, F>(exec: Exec, total: u64, chunk: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<u64>) -> Vec<R> + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = total.div_ceil(chunk) as usize;
    let ranges = |c: usize| {
        let start = c as u64 * chunk;
        start..(start + chunk).min(total)
    };
    map_range(exec, n_chunks, |c| f(ranges(c)))
        .into_iter()
        .flatten()
        .collect()
}

/// Maximum of `f` over `0..n` (NaN-free inputs assumed); 0 for an empty range.
pub fn max_range<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_range(exec, n, f).into_iter().fold(0.0, f64::max)
}
