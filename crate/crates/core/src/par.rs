//! Thin switch between rayon and sequential iteration.
//!
//! With the `parallel` feature (default) [`Parallelism::Parallel`] fans work
//! out over the global rayon pool; without it, or with
//! [`Parallelism::Sequential`], the same closures run in order. Callers only
//! use order-insensitive merges (integer sums, collected vectors), so results
//! never depend on the choice.

/// How a computation may use worker threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// `items.map(f).collect()`, possibly in parallel, preserving order.
pub fn map_collect<T, R, F>(par: Parallelism, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = par;
    items.into_iter().map(f).collect()
}

/// Fills `out[i] = f(i)`, possibly in parallel.
pub fn fill_indexed<R, F>(par: Parallelism, out: &mut [R], f: F)
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, slot)| *slot = f(i));
        return;
    }
    let _ = par;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

/// Number of worker threads the parallel path would use.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Sizes the global worker pool. Only the first call before any parallel
/// work takes effect; without the `parallel` feature this does nothing.
pub fn set_worker_count(n: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::Error::OutOfRange { name: "workers", value: 0.0, expected: ">= 1" });
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| crate::Error::Unsupported(format!("worker pool: {e}")))?;
    Ok(())
}
