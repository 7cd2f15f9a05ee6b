//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread over a rayon pool; without it everything runs on the calling
//! thread. Results are always returned in input order, so output never
//! depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential counterpart of [`map`], always single-threaded. Used by the
/// benches and by tests asserting order independence.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Runs `op` with at most `jobs` worker threads. `None` or `Some(0)` uses
/// the global pool. A no-op wrapper when built without `parallel`.
pub fn with_jobs<R, F>(jobs: Option<usize>, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match jobs {
            Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            _ => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        op()
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let par = map(&items, |x| x * x);
        let seq = map_sequential(&items, |x| x * x);
        assert_eq!(par, seq);
        assert_eq!(map_range(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn with_jobs_runs_op() {
        assert_eq!(with_jobs(Some(2), || map_range(3, |i| i * 2)), vec![0, 2, 4]);
        assert_eq!(with_jobs(None, || 7), 7);
    }
}
