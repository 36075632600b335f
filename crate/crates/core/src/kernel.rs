//! Gaussian (RBF) kernel and the label-weighted kernel matrix `Ψ_ij = y_i y_j k(x_i, x_j)`.

use std::collections::HashSet;

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// RBF kernel parameter. `gamma` is stored negative and multiplies the squared
/// distance directly: `k(a, b) = exp(gamma · ‖a − b‖²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    gamma: f64,
}

impl KernelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma >= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and negative, got {gamma}"
            )));
        }
        Ok(KernelParams { gamma })
    }

    /// Accept the usual positive "bandwidth" convention and negate it.
    pub fn from_bandwidth(bandwidth: f64) -> Result<Self> {
        Self::new(-bandwidth)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
        let mut dist = 0.0;
        for (x, y) in a.iter().zip(b.iter()) {
            let d = x - y;
            dist += d * d;
        }
        (self.gamma * dist).exp()
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { gamma: -1.0 }
    }
}

pub fn rbf(xi: ArrayView1<f64>, xj: ArrayView1<f64>, params: &KernelParams) -> Result<f64> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: xj.len(),
        });
    }
    Ok(params.eval_unchecked(xi, xj))
}

/// Dense `N×N` label-weighted kernel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    entries: Array2<f64>,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }
}

pub(crate) fn check_labels(x: &ArrayView2<f64>, y: &ArrayView1<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidLabel(bad));
    }
    Ok(())
}

fn check_inputs(x: &ArrayView2<f64>, y: &ArrayView1<f64>) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::InvalidCount("at least one sample is required".into()));
    }
    check_labels(x, y)
}

pub fn build_kernel_matrix(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
) -> Result<KernelMatrix> {
    build_kernel_matrix_with(x, y, params, Exec::default())
}

/// Upper triangle row by row, then mirrored, so the result is bitwise symmetric.
pub fn build_kernel_matrix_with(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
    exec: Exec,
) -> Result<KernelMatrix> {
    check_inputs(&x, &y)?;
    let n = x.nrows();
    let mut entries = Array2::zeros((n, n));
    exec.fill_rows(&mut entries, |i, row| {
        let xi = x.row(i);
        row[i] = 1.0;
        for j in (i + 1)..n {
            row[j] = y[i] * y[j] * params.eval_unchecked(xi, x.row(j));
        }
    });
    for i in 0..n {
        for j in (i + 1)..n {
            entries[[j, i]] = entries[[i, j]];
        }
    }
    Ok(KernelMatrix { entries })
}

pub(crate) fn check_subset(m: &[usize], n: usize) -> Result<()> {
    let mut seen = HashSet::with_capacity(m.len());
    for &idx in m {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
        if !seen.insert(idx) {
            return Err(Error::DuplicateIndex(idx));
        }
    }
    Ok(())
}

pub fn kernel_columns(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
    m: &[usize],
) -> Result<Array2<f64>> {
    kernel_columns_with(x, y, params, m, Exec::default())
}

/// Columns `m` of `Ψ` as an `N×c` matrix, without forming the full `N×N` matrix.
pub fn kernel_columns_with(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
    m: &[usize],
    exec: Exec,
) -> Result<Array2<f64>> {
    check_inputs(&x, &y)?;
    let n = x.nrows();
    check_subset(m, n)?;
    let mut out = Array2::zeros((n, m.len()));
    exec.fill_rows(&mut out, |i, row| {
        let xi = x.row(i);
        for (slot, &j) in row.iter_mut().zip(m) {
            *slot = if i == j {
                1.0
            } else {
                y[i] * y[j] * params.eval_unchecked(xi, x.row(j))
            };
        }
    });
    Ok(out)
}
