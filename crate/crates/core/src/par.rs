//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the closures run on the rayon pool;
//! without it the same call sites compile to plain iterator loops.  All users
//! combine results with exact arithmetic, so reduction order never matters.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map an indexed range into a vector.
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

/// Map a slice into a vector.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
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

/// Fold each item into an accumulator and merge the partial accumulators.
pub fn fold_merge<T, A, F, M>(items: &[T], init: impl Fn() -> A + Sync + Send, f: F, merge: M) -> A
where
    T: Sync,
    A: Send,
    F: Fn(A, &T) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter()
            .fold(&init, |acc, t| f(acc, t))
            .reduce(&init, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &merge;
        items.iter().fold(init(), |acc, t| f(acc, t))
    }
}
