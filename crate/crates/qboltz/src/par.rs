//! Data-parallel map helper with a sequential fallback.
//!
//! With the default `parallel` feature the indexed map fans out over rayon;
//! without it the same call runs sequentially. Results are always collected
//! in index order, so outputs are identical either way.

/// Applies `f` to `0..n` and collects the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Applies `f` to `0..n` and collects the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_serial(n, f)
}

/// Sequential reference implementation of [`map_indexed`]; always available
/// so benchmarks can compare both routes.
pub fn map_indexed_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
