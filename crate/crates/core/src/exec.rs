//! Execution policy for the data-parallel loops (kernel rows, sweep cells).
//!
//! Every parallel loop writes disjoint outputs whose values are computed by the
//! same sequential code as the fallback, so results are bit-identical whichever
//! policy runs them. Without the `parallel` feature, [`Exec::Parallel`] silently
//! degrades to sequential execution.

use ndarray::Array2;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this policy will actually fan out to the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Fill each row of a standard-layout matrix with `f(row_index, row)`.
    pub fn fill_rows<F>(self, out: &mut Array2<f64>, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let cols = out.ncols();
        if cols == 0 {
            return;
        }
        let data = out
            .as_slice_mut()
            .expect("fill_rows requires a standard-layout matrix");
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(cols)
                .enumerate()
                .for_each(|(i, row)| f(i, row));
            return;
        }
        data.chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
    }

    /// Ordered map over `0..n`.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}
