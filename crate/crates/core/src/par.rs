//! Row-parallel helpers. With the `parallel` feature rows are processed on
//! the rayon pool; reductions always combine per-row partials in row order
//! so results do not depend on the thread count.

use ndarray::{ArrayViewMut1, ArrayViewMut2, Axis};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn for_each_row_mut<F>(m: &mut ArrayViewMut2<'_, f64>, f: F)
where
    F: Fn(usize, ArrayViewMut1<'_, f64>) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    m.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, row)| f(i, row));
    #[cfg(not(feature = "parallel"))]
    m.axis_iter_mut(Axis(0))
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Like [`for_each_row_mut`] but collects a per-row result in row order.
pub(crate) fn map_rows_mut<T, F>(m: &mut ArrayViewMut2<'_, f64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, ArrayViewMut1<'_, f64>) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        m.axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .map(|(i, row)| f(i, row))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        m.axis_iter_mut(Axis(0))
            .enumerate()
            .map(|(i, row)| f(i, row))
            .collect()
    }
}

/// Evaluates `f` for every row index and returns the results in order.
pub(crate) fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Sum of `f(i)` over rows, accumulated sequentially in row order.
pub(crate) fn sum_rows<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_rows(n, f).into_iter().sum()
}
