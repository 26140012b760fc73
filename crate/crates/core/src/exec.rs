//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (default) the [`Execution::Parallel`] mode runs
//! on the rayon global pool. Without it, every mode runs sequentially.
//!
//! Reductions are split into fixed-size chunks whose partial results are
//! combined in index order, so both modes produce bit-identical sums.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Elements per reduction chunk. Fixed so results do not depend on thread count.
pub const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `(0..n).map(f).collect()`, possibly in parallel; output order is preserved.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Fill `out[i] = f(i)`.
    pub fn fill<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => out
                .par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        *slot = f(c * CHUNK + k);
                    }
                }),
            _ => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = f(i);
                }
            }
        }
    }

    /// Apply `f(chunk_index, chunk)` to consecutive `len`-sized chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => data
                .par_chunks_mut(len)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            _ => data.chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }

    /// Deterministic chunked sum of `chunk_sum(range)` over `0..n`.
    pub fn sum<F>(self, n: usize, chunk_sum: F) -> f64
    where
        F: Fn(Range<usize>) -> f64 + Sync + Send,
    {
        let chunks = n.div_ceil(CHUNK);
        let partial = self.map(chunks, |c| chunk_sum(c * CHUNK..((c + 1) * CHUNK).min(n)));
        partial.into_iter().sum()
    }

    /// Chunked max; `None` when every chunk returns `None`.
    pub fn max<F>(self, n: usize, chunk_max: F) -> Option<f64>
    where
        F: Fn(Range<usize>) -> Option<f64> + Sync + Send,
    {
        let chunks = n.div_ceil(CHUNK);
        self.map(chunks, |c| chunk_max(c * CHUNK..((c + 1) * CHUNK).min(n)))
            .into_iter()
            .flatten()
            .reduce(f64::max)
    }
}
