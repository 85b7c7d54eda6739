//! Deterministic parallel helpers: results always come back in index order.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::cli::CliError;

/// A pool with `n` workers; `0` lets rayon choose.
pub fn pool(n: usize) -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}

/// `f(0), …, f(n−1)` evaluated in parallel.
pub fn trials<T: Send>(n: u64, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    (0..n).into_par_iter().map(|t| f(t)).collect()
}

pub fn map_ordered<A: Sync, T: Send>(items: &[A], f: impl Fn(usize, &A) -> T + Sync) -> Vec<T> {
    items.par_iter().enumerate().map(|(i, a)| f(i, a)).collect()
}
