//! Symmetric eigendecomposition by the cyclic Jacobi method.
//!
//! One code path serves both consumers: the Nyström factorization of the
//! sampled kernel block and the inversion of the ADMM system matrix.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_OFF_DIAG_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 30;
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// A square matrix that is exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    data: Array2<f64>,
}

impl SymmetricMatrix {
    /// Wrap `data`, rejecting anything that is not square and exactly symmetric.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let n = check_square(&data)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if data[[i, j]] != data[[j, i]] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix { data })
    }

    /// Replace `data` by `(data + dataᵀ) / 2`.
    pub fn symmetrize(mut data: Array2<f64>) -> Result<Self> {
        let n = check_square(&data)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (data[[i, j]] + data[[j, i]]);
                data[[i, j]] = m;
                data[[j, i]] = m;
            }
        }
        Ok(SymmetricMatrix { data })
    }

    /// Build from the upper triangle of `data`, mirroring it onto the lower one.
    pub fn from_upper(mut data: Array2<f64>) -> Result<Self> {
        let n = check_square(&data)?;
        for i in 0..n {
            for j in (i + 1)..n {
                data[[j, i]] = data[[i, j]];
            }
        }
        Ok(SymmetricMatrix { data })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }
}

fn check_square(data: &Array2<f64>) -> Result<usize> {
    let (r, c) = data.dim();
    if r != c {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: c,
        });
    }
    if r == 0 {
        return Err(Error::InvalidCount("matrix dimension must be at least 1".into()));
    }
    Ok(r)
}

/// Eigenvectors (as columns of `q`) and eigenvalues sorted in non-increasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvdResult {
    pub q: Array2<f64>,
    pub d: Array1<f64>,
    pub sweeps_used: usize,
}

impl EvdResult {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `q · diag(d) · qᵀ`
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.q * &self.d;
        scaled.dot(&self.q.t())
    }
}

/// Reciprocal and reciprocal square root of the retained leading eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTruncation {
    pub rank_kept: usize,
    pub inv_sqrt: Array1<f64>,
    pub inv: Array1<f64>,
}

/// Decompose `a = q·diag(d)·qᵀ` with cyclic-by-rows Givens sweeps.
///
/// Sweeps continue until the off-diagonal Frobenius norm drops to
/// `off_diag_tol · ‖a‖_F`. Eigenpairs are then sorted descending (ties keep
/// their diagonal order) and each eigenvector is signed so that its
/// largest-magnitude entry is non-negative.
pub fn jacobi_evd(a: &SymmetricMatrix, off_diag_tol: f64, max_sweeps: usize) -> Result<EvdResult> {
    if !(off_diag_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "off_diag_tol must be positive, got {off_diag_tol}"
        )));
    }
    if max_sweeps == 0 {
        return Err(Error::InvalidCount("max_sweeps must be at least 1".into()));
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("jacobi_evd input"));
    }

    let n = a.n();
    let mut m: Vec<f64> = a.data.iter().copied().collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let target = off_diag_tol * frobenius(&m);
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&m, n);
    while off > target && sweeps < max_sweeps {
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
        off = off_diagonal_norm(&m, n);
    }

    let result = sorted_result(&m, &v, n, sweeps);
    if off > target {
        return Err(Error::NoConvergence {
            sweeps,
            off_norm: off,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// `jacobi_evd` with the default tolerance and sweep budget.
pub fn jacobi_evd_default(a: &SymmetricMatrix) -> Result<EvdResult> {
    jacobi_evd(a, DEFAULT_OFF_DIAG_TOL, DEFAULT_MAX_SWEEPS)
}

/// Annihilate `m[p][q]` with one Givens rotation, accumulating it into `v`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // A ← A·J on columns p, q.
    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = c * akp - s * akq;
        m[k * n + q] = s * akp + c * akq;
    }
    // A ← Jᵀ·A on rows p, q.
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = c * apk - s * aqk;
        m[q * n + k] = s * apk + c * aqk;
    }
    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = m[i * n + j];
            acc += x * x;
        }
    }
    (2.0 * acc).sqrt()
}

fn sorted_result(m: &[f64], v: &[f64], n: usize, sweeps: usize) -> EvdResult {
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal eigenvalues keep their original index order.
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));

    let mut q = Array2::zeros((n, n));
    let mut d = Array1::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        d[col] = diag[src];
        let mut pivot = 0.0f64;
        for row in 0..n {
            let x = v[row * n + src];
            if x.abs() > pivot.abs() {
                pivot = x;
            }
        }
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for row in 0..n {
            q[[row, col]] = sign * v[row * n + src];
        }
    }
    EvdResult {
        q,
        d,
        sweeps_used: sweeps,
    }
}

/// Keep the leading eigenvalues among the first `r` that exceed
/// `eig_tol · max(d[0], 1)` and precompute their inverse and inverse square root.
pub fn truncate_spectrum(evd: &EvdResult, r: usize, eig_tol: f64) -> Result<SpectralTruncation> {
    let n = evd.n();
    if r == 0 || r > n {
        return Err(Error::InvalidCount(format!(
            "truncation rank {r} must lie in 1..={n}"
        )));
    }
    if !(eig_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eig_tol must be non-negative, got {eig_tol}"
        )));
    }
    let lead = evd.d[0];
    if lead <= eig_tol {
        return Err(Error::RankDeficient(format!(
            "largest eigenvalue {lead:e} does not exceed tolerance {eig_tol:e}"
        )));
    }
    let threshold = eig_tol * lead.max(1.0);
    let rank_kept = evd
        .d
        .iter()
        .take(r)
        .take_while(|&&x| x > threshold)
        .count();
    let inv: Array1<f64> = evd.d.iter().take(rank_kept).map(|x| 1.0 / x).collect();
    let inv_sqrt: Array1<f64> = evd
        .d
        .iter()
        .take(rank_kept)
        .map(|x| 1.0 / x.sqrt())
        .collect();
    Ok(SpectralTruncation {
        rank_kept,
        inv_sqrt,
        inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn evd_of(d: Vec<f64>) -> EvdResult {
        let n = d.len();
        EvdResult {
            q: Array2::eye(n),
            d: Array1::from(d),
            sweeps_used: 0,
        }
    }

    #[test]
    fn identity_is_already_diagonal() {
        let a = SymmetricMatrix::new(Array2::eye(3)).unwrap();
        let evd = jacobi_evd_default(&a).unwrap();
        assert_eq!(evd.d.to_vec(), vec![1.0, 1.0, 1.0]);
        assert_eq!(evd.q, Array2::<f64>::eye(3));
        assert_eq!(evd.sweeps_used, 0);
    }

    #[test]
    fn two_by_two() {
        let a = SymmetricMatrix::new(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let evd = jacobi_evd_default(&a).unwrap();
        assert_abs_diff_eq!(evd.d[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(evd.d[1], 1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(evd.q[[0, 0]].abs(), h, epsilon = 1e-14);
        assert_abs_diff_eq!(evd.q[[1, 0]], evd.q[[0, 0]], epsilon = 1e-14);
        assert_abs_diff_eq!(evd.q[[1, 1]], -evd.q[[0, 1]], epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric_and_empty() {
        assert!(SymmetricMatrix::new(array![[1.0, 2.0], [0.0, 1.0]]).is_err());
        assert!(SymmetricMatrix::new(Array2::zeros((0, 0))).is_err());
        assert!(SymmetricMatrix::new(Array2::zeros((2, 3))).is_err());
        let s = SymmetricMatrix::symmetrize(array![[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert_eq!(s.as_array()[[0, 1]], 1.0);
    }

    #[test]
    fn non_finite_input() {
        let a = SymmetricMatrix::new(array![[f64::NAN]]).unwrap();
        assert!(matches!(jacobi_evd_default(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sweep_budget_exhaustion_returns_best_effort() {
        let a = SymmetricMatrix::from_upper(Array2::from_shape_fn((12, 12), |(i, j)| {
            1.0 / (1.0 + i as f64 + j as f64)
        }))
        .unwrap();
        match jacobi_evd(&a, 1e-15, 1) {
            Err(Error::NoConvergence { sweeps, best, .. }) => {
                assert_eq!(sweeps, 1);
                assert_eq!(best.n(), 12);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn sign_and_tie_conventions() {
        let a = SymmetricMatrix::new(array![[-1.0, 0.0], [0.0, 1.0]]).unwrap();
        let evd = jacobi_evd_default(&a).unwrap();
        assert_eq!(evd.d.to_vec(), vec![1.0, -1.0]);
        assert_eq!(evd.q, array![[0.0, 1.0], [1.0, 0.0]]);
        for col in evd.q.columns() {
            let max = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(max >= 0.0);
        }
    }

    #[test]
    fn truncation_examples() {
        let t = truncate_spectrum(&evd_of(vec![4.0, 1.0, 0.0]), 2, 1e-12).unwrap();
        assert_eq!(t.rank_kept, 2);
        assert_eq!(t.inv_sqrt.to_vec(), vec![0.5, 1.0]);
        assert_eq!(t.inv.to_vec(), vec![0.25, 1.0]);

        let t = truncate_spectrum(&evd_of(vec![4.0, 1e-15, 0.0]), 2, 1e-10).unwrap();
        assert_eq!(t.rank_kept, 1);

        let t = truncate_spectrum(&evd_of(vec![9.0]), 1, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(t.inv.to_vec(), vec![1.0 / 9.0]);
        assert_eq!(t.inv_sqrt.to_vec(), vec![1.0 / 3.0]);
    }

    #[test]
    fn truncation_errors() {
        assert!(matches!(
            truncate_spectrum(&evd_of(vec![0.0, 0.0]), 1, 1e-10),
            Err(Error::RankDeficient(_))
        ));
        assert!(truncate_spectrum(&evd_of(vec![1.0]), 2, 0.0).is_err());
        assert!(truncate_spectrum(&evd_of(vec![1.0]), 0, 0.0).is_err());
        // Negative eigenvalues never survive.
        let t = truncate_spectrum(&evd_of(vec![2.0, -1.0]), 2, 0.0).unwrap();
        assert_eq!(t.rank_kept, 1);
    }
}
