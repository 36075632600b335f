//! Nyström low-rank factorization `Ψ ≈ V·Vᵀ`.
//!
//! With `M` a uniformly sampled column subset, `Ψ_MM = Q·D·Qᵀ`, and the leading
//! `r` eigenpairs retained, the factor is `V = Ψ_{·,M} · Q_{·,r} · D_{r,r}^{-1/2}`.
//! `Q_{·,r}` and `D_{r,r}` are kept because the sparse dual weights are recovered
//! from them after training.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernel::{self, KernelMatrix, KernelParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NystromConfig {
    /// Number of sampled columns.
    pub c: usize,
    /// Target rank.
    pub r: usize,
    pub seed: u64,
    pub eig_tol: f64,
}

impl NystromConfig {
    /// `c = r`, the recommended setting.
    pub fn square(rank: usize, seed: u64) -> Self {
        NystromConfig {
            c: rank,
            r: rank,
            seed,
            eig_tol: eigen::DEFAULT_EIG_TOL,
        }
    }

    /// Checks `1 ≤ r ≤ c ≤ n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.r == 0 || self.r > self.c || self.c > n {
            return Err(Error::InvalidCount(format!(
                "Nystrom sizes must satisfy 1 <= r <= c <= N (r = {}, c = {}, N = {n})",
                self.r, self.c
            )));
        }
        if !(self.eig_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eig_tol must be non-negative, got {}",
                self.eig_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NystromFactor {
    /// `N × effective_rank`
    pub v: Array2<f64>,
    /// Sampled column indices, ascending.
    pub m: Vec<usize>,
    /// `c × effective_rank` leading eigenvectors of `Ψ_MM`.
    pub q_r: Array2<f64>,
    /// Retained eigenvalues of `Ψ_MM`, descending.
    pub d_r: Array1<f64>,
    pub effective_rank: usize,
}

/// `c` distinct indices drawn uniformly without replacement from `0..n`, sorted.
pub fn sample_subset(n: usize, c: usize, seed: u64) -> Result<Vec<usize>> {
    if c == 0 || c > n {
        return Err(Error::InvalidCount(format!(
            "cannot sample {c} distinct indices from {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = rand::seq::index::sample(&mut rng, n, c).into_vec();
    m.sort_unstable();
    Ok(m)
}

pub fn nystrom_factor(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
    cfg: &NystromConfig,
) -> Result<NystromFactor> {
    nystrom_factor_with(x, y, params, cfg, Exec::default())
}

pub fn nystrom_factor_with(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    params: &KernelParams,
    cfg: &NystromConfig,
    exec: Exec,
) -> Result<NystromFactor> {
    let n = x.nrows();
    cfg.validate(n)?;
    let m = sample_subset(n, cfg.c, cfg.seed)?;
    let columns = kernel::kernel_columns_with(x, y, params, &m, exec)?;
    factor_from_columns(columns, m, cfg.r, cfg.eig_tol)
}

/// Finish the factorization given the sampled columns `Ψ_{·,M}`.
pub fn factor_from_columns(
    columns: Array2<f64>,
    m: Vec<usize>,
    r: usize,
    eig_tol: f64,
) -> Result<NystromFactor> {
    let block = columns.select(Axis(0), &m);
    let block = SymmetricMatrix::new(block)?;
    let evd = eigen::jacobi_evd_default(&block)?;
    let trunc = eigen::truncate_spectrum(&evd, r, eig_tol)?;
    let k = trunc.rank_kept;
    if k < r {
        log::warn!("Nystrom factor truncated from rank {r} to {k}: trailing eigenvalues of the sampled block are numerically zero");
    }
    let q_r = evd.q.slice(ndarray::s![.., ..k]).to_owned();
    let d_r = evd.d.slice(ndarray::s![..k]).to_owned();
    let v = columns.dot(&(&q_r * &trunc.inv_sqrt));
    Ok(NystromFactor {
        v,
        m,
        q_r,
        d_r,
        effective_rank: k,
    })
}

/// `(1/N²) · Σ_ij (Ψ_ij − [V·Vᵀ]_ij)²`
pub fn approximation_mse(psi: &KernelMatrix, factor: &NystromFactor) -> Result<f64> {
    let n = psi.n();
    if factor.v.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: factor.v.nrows(),
        });
    }
    let approx = factor.v.dot(&factor.v.t());
    let sse: f64 = psi
        .entries()
        .iter()
        .zip(approx.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sse / (n * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn full_selection_is_everything() {
        assert_eq!(sample_subset(5, 5, 17).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn sampling_is_deterministic_and_sorted() {
        let a = sample_subset(100, 10, 7).unwrap();
        let b = sample_subset(100, 10, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(a, sample_subset(100, 10, 8).unwrap());
    }

    #[test]
    fn invalid_counts() {
        assert!(matches!(sample_subset(5, 0, 0), Err(Error::InvalidCount(_))));
        assert!(matches!(sample_subset(5, 6, 0), Err(Error::InvalidCount(_))));
        let bad = NystromConfig { c: 3, r: 4, seed: 0, eig_tol: 0.0 };
        assert!(bad.validate(10).is_err());
        assert!(NystromConfig::square(11, 0).validate(10).is_err());
        assert!(NystromConfig::square(10, 0).validate(10).is_ok());
    }

    #[test]
    fn rank_one_kernel_from_repeated_sample() {
        let x = array![[0.2, 0.4], [0.2, 0.4], [0.2, 0.4]];
        let y = array![1.0, 1.0, 1.0];
        let p = KernelParams::default();
        let f = nystrom_factor(x.view(), y.view(), &p, &NystromConfig::square(1, 3)).unwrap();
        assert_eq!(f.effective_rank, 1);
        let approx = f.v.dot(&f.v.t());
        assert_eq!(approx, Array2::<f64>::ones((3, 3)));
    }

    #[test]
    fn zero_factor_mse_is_mean_square() {
        let x = array![[0.0], [1.0], [3.0]];
        let y = array![1.0, -1.0, 1.0];
        let p = KernelParams::new(-0.5).unwrap();
        let psi = kernel::build_kernel_matrix(x.view(), y.view(), &p).unwrap();
        let f = NystromFactor {
            v: Array2::zeros((3, 0)),
            m: vec![],
            q_r: Array2::zeros((0, 0)),
            d_r: Array1::zeros(0),
            effective_rank: 0,
        };
        let want = psi.entries().iter().map(|v| v * v).sum::<f64>() / 9.0;
        assert_eq!(approximation_mse(&psi, &f).unwrap(), want);
        let short = NystromFactor { v: Array2::zeros((2, 1)), ..f };
        assert!(approximation_mse(&psi, &short).is_err());
    }
}
