//! Order-preserving map over independent tasks.
//!
//! With the `parallel` feature the map runs on a rayon pool of `workers`
//! threads (`0` means one per core). `workers == 1`, or a build without the
//! feature, runs the plain sequential loop. Results always come back in
//! input order, so callers that aggregate afterwards see identical values
//! under any schedule.

/// Parallelism requested for a scan. `0` means all available cores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Workers {
    pub fn sequential() -> Self {
        Workers(1)
    }
}

pub fn map_ordered<T, R, F>(items: &[T], workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers.0 != 1 {
        use rayon::prelude::*;

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.0)
            .build()
            .expect("rayon thread pool");
        return pool.install(|| items.par_iter().map(&f).collect());
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;

    items.iter().map(f).collect()
}
