//! Deterministic chunked loops.
//!
//! Every reduction is split into fixed-size chunks whose partial results are
//! combined in chunk order, so the floating-point result is the same with or
//! without the `rayon` feature and for any thread count.

use alloc::vec::Vec;
use core::ops::Range;

pub(crate) const CHUNK: usize = 1 << 13;

fn chunk_range(i: usize, chunk: usize, len: usize) -> Range<usize> {
    let start = i * chunk;
    start..(start + chunk).min(len)
}

/// Evaluates `f` on consecutive ranges of `0..len` and returns the partial
/// results in order.
pub(crate) fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let n = len.div_ceil(chunk).max(1);
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        if n > 1 {
            return (0..n)
                .into_par_iter()
                .map(|i| f(chunk_range(i, chunk, len)))
                .collect();
        }
    }
    (0..n).map(|i| f(chunk_range(i, chunk, len))).collect()
}

/// Runs `f(i)` for every `i in 0..n`, possibly in parallel, collecting in order.
pub(crate) fn map_jobs<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "rayon"))]
    (0..n).map(f).collect()
}

/// Fills `out` chunk by chunk; `f` receives the chunk's starting offset.
pub(crate) fn fill_chunks<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
        return;
    }
    #[cfg(not(feature = "rayon"))]
    for (i, c) in out.chunks_mut(chunk).enumerate() {
        f(i * chunk, c);
    }
}
