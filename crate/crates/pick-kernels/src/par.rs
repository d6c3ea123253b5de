//! Data-parallel map helpers. With the `parallel` feature (default) these
//! fan out over rayon; without it they run sequentially. Output order always
//! matches input order.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub(crate) fn try_map_enumerated<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    items
        .par_iter()
        .enumerate()
        .map(|(i, t)| f(i, t))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_enumerated<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    F: Fn(usize, &T) -> Result<U>,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn try_map_range<U, F>(n: usize, f: F) -> Result<Vec<U>>
where
    U: Send,
    F: Fn(usize) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_range<U, F>(n: usize, f: F) -> Result<Vec<U>>
where
    F: Fn(usize) -> Result<U>,
{
    (0..n).map(f).collect()
}
