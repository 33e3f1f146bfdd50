//! Data-parallel node loops, backed by rayon when the `parallel` feature is
//! on (the default) and by plain sequential iteration otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..len` and collect the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T>(len: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Sum `f` over `0..len` with a fixed reduction tree, so the result does not
/// depend on thread scheduling.
pub fn sum_indexed(
    len: usize,
    #[cfg(feature = "parallel")] f: impl Fn(usize) -> f64 + Sync,
    #[cfg(not(feature = "parallel"))] f: impl Fn(usize) -> f64,
) -> f64 {
    const CHUNK: usize = 4096;
    let nchunks = len.div_ceil(CHUNK);
    let partials = map_indexed(nchunks, |c| {
        let start = c * CHUNK;
        let end = ((c + 1) * CHUNK).min(len);
        (start..end).map(&f).sum::<f64>()
    });
    partials.iter().sum()
}
