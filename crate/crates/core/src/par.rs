//! Data-parallel helpers.
//!
//! With the `parallel` feature the maps below run on rayon's pool; without it,
//! or when parallelism is switched off at runtime, they run sequentially.
//! Results are always collected in input order, so any reduction performed by
//! the caller over the returned vector is independent of scheduling.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL_ENABLED: AtomicBool = AtomicBool::new(true);

/// Switch the rayon path on or off at runtime. Has no effect without the
/// `parallel` feature.
pub fn set_parallel(enabled: bool) {
    PARALLEL_ENABLED.store(enabled, Ordering::SeqCst);
}

/// Whether maps in this module currently dispatch to rayon.
pub fn parallel_active() -> bool {
    cfg!(feature = "parallel") && PARALLEL_ENABLED.load(Ordering::SeqCst)
}

/// Ordered map over a slice.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_active() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Ordered map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_active() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Ordered map whose closure may fail; the first error in input order wins.
pub fn try_map_slice<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map_slice(items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_in_both_modes() {
        let xs: Vec<u64> = (0..1000).collect();
        set_parallel(false);
        let seq = map_slice(&xs, |x| x * x);
        set_parallel(true);
        let par = map_slice(&xs, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(map_range(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }
}
