//! Data-parallel helpers: rayon when the `parallel` feature is on and enabled
//! at runtime, a plain loop otherwise. Results are always returned in index
//! order, so reductions over them are deterministic.

use std::sync::atomic::{AtomicBool, Ordering};

static ENABLED: AtomicBool = AtomicBool::new(cfg!(feature = "parallel"));

/// Turns the parallel code path on or off at runtime. Without the `parallel`
/// feature this has no effect.
pub fn set_parallel(on: bool) {
    ENABLED.store(on && cfg!(feature = "parallel"), Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    ENABLED.load(Ordering::Relaxed)
}

/// `(0..n).map(f).collect()`, possibly evaluated in parallel.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}
