//! Thin facade over the data-parallel runtime.
//!
//! With the `parallel` feature (default), independent work items run under
//! rayon; merges are associative and commutative with total tie-breaking, so
//! results are identical for any shard count or thread count. The sequential
//! path is always compiled and is used by the benchmarks as the baseline.

/// Map `items` and fold the results with an associative, commutative `merge`.
pub fn map_reduce<T, R, F, M>(items: Vec<T>, map: F, merge: M, identity: R) -> R
where
    T: Send,
    R: Send + Sync + Clone,
    F: Fn(T) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .into_par_iter()
            .map(map)
            .reduce(|| identity.clone(), &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(map).fold(identity, merge)
    }
}

/// Sequential reference path with the same contract as [`map_reduce`]; the
/// criterion benches compare the two.
pub fn map_reduce_sequential<T, R, F, M>(items: Vec<T>, map: F, merge: M, identity: R) -> R
where
    F: Fn(T) -> R,
    M: Fn(R, R) -> R,
{
    items.into_iter().map(map).fold(identity, merge)
}

/// Number of workers the parallel path will use.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Cap the global worker pool; honored once, before first parallel use.
/// Driven by the `MAHLER_LAB_THREADS` environment variable in the CLI.
pub fn configure_workers(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        true
    }
}
