//! Feature-gated data-parallel helpers. With the `parallel` feature the maps
//! run on rayon; without it they run sequentially. Both produce identical,
//! order-preserving output, so every caller is scheduling-independent by
//! construction.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map over index ranges `[start, end)` split into chunks, then fold the
/// per-chunk results in chunk order. The fold is expected to be associative
/// and commutative, so the outcome does not depend on scheduling.
pub fn map_reduce_ranges<U: Send>(
    start: u64,
    end: u64,
    chunk: u64,
    map: impl Fn(u64, u64) -> U + Sync + Send,
    identity: impl Fn() -> U + Sync + Send,
    fold: impl Fn(U, U) -> U + Sync + Send,
) -> U {
    let chunk = chunk.max(1);
    let bounds: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut lo = start;
        while lo < end {
            let hi = (lo + chunk).min(end);
            v.push((lo, hi));
            lo = hi;
        }
        v
    };
    #[cfg(feature = "parallel")]
    {
        bounds
            .par_iter()
            .map(|&(lo, hi)| map(lo, hi))
            .reduce(identity, fold)
    }
    #[cfg(not(feature = "parallel"))]
    {
        bounds.iter().fold(identity(), |acc, &(lo, hi)| fold(acc, map(lo, hi)))
    }
}
