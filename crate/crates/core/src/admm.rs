//! ADMM solver for the linear soft-margin SVM
//!
//! ```text
//! min  Σ_i (1 − y_i(x_iᵀβ + β₀))₊ + λ/2 ‖β‖²
//! ```
//!
//! Two algebraically equivalent iterations are provided.
//!
//! * [`SolverPath::Reference`] splits on `a = 1 − Y(Xβ + β₀1)` and solves the
//!   `(p+1)×(p+1)` system once through a precomputed `A⁻¹`, then updates
//!   `β̃ = [β; β₀]`, `a` and the multiplier `u` in turn. It stops on
//!   `‖β̃⁽ᵏ⁺¹⁾ − β̃⁽ᵏ⁾‖² ≤ ε`.
//! * [`SolverPath::Efficient`] folds `Y`, `X̃ = [X 1]`, `Q` and `D^{-1/2}` from
//!   `A = QDQᵀ` into one `N×(p+1)` matrix `Z`, so that `Y X̃ A⁻¹ X̃ᵀ Y = ZZᵀ`.
//!   It iterates on the scaled auxiliary `â = ρ·a` and `θ`, and stops on
//!   `‖u⁽ᵏ⁺¹⁾ − u⁽ᵏ⁾‖ ≤ ε`. `β̃ = Q D^{-1/2} S` is recovered at the end.
//!
//! The iterates of both paths are related exactly by `â = ρ·a` with identical
//! `u`; the tests check this step by step.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::eigen::{self, EvdResult, SpectralTruncation, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::kernel::check_labels;

/// Iterates larger than this in magnitude are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPath {
    Reference,
    Efficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    pub lambda: f64,
    /// Augmented-Lagrangian penalty.
    pub rho: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub path: SolverPath,
    /// Record training accuracy of every iterate in the trace.
    pub track_accuracy: bool,
    /// Stop as soon as the iterate's training accuracy reaches this fraction.
    pub target_accuracy: Option<f64>,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            lambda: 10.0,
            rho: 1.0,
            epsilon: 1e-6,
            max_iters: 500,
            path: SolverPath::Efficient,
            track_accuracy: false,
            target_accuracy: None,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("rho", self.rho),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidCount("max_iters must be at least 1".into()));
        }
        if let Some(t) = self.target_accuracy {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "target accuracy must lie in [0, 1], got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Training design `X̃ = [X 1]` with its `±1` labels.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedDesign {
    x_tilde: Array2<f64>,
    y: Array1<f64>,
}

impl AugmentedDesign {
    pub fn new(x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<Self> {
        check_labels(&x, &y)?;
        if x.nrows() == 0 {
            return Err(Error::InvalidCount("design needs at least one sample".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        let (n, p) = x.dim();
        let mut x_tilde = Array2::ones((n, p + 1));
        x_tilde.slice_mut(ndarray::s![.., ..p]).assign(&x);
        Ok(AugmentedDesign {
            x_tilde,
            y: y.to_owned(),
        })
    }

    pub fn n(&self) -> usize {
        self.x_tilde.nrows()
    }

    /// Number of features `p` (excluding the bias column).
    pub fn p(&self) -> usize {
        self.x_tilde.ncols() - 1
    }

    pub fn x_tilde(&self) -> &Array2<f64> {
        &self.x_tilde
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    /// `Y · X̃`
    pub fn signed(&self) -> Array2<f64> {
        &self.x_tilde * &self.y.view().insert_axis(Axis(1))
    }

    fn has_both_classes(&self) -> bool {
        self.y.iter().any(|&v| v > 0.0) && self.y.iter().any(|&v| v < 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `‖u⁽ᵏ⁺¹⁾ − u⁽ᵏ⁾‖`
    pub u_residual: f64,
    /// `‖β̃⁽ᵏ⁺¹⁾ − β̃⁽ᵏ⁾‖²`
    pub beta_residual: f64,
    pub train_accuracy: Option<f64>,
    /// Wall-clock since the solver was entered.
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    /// The residual criterion of the selected path was met.
    pub converged: bool,
    /// The run stopped early because the target accuracy was reached.
    pub reached_target: bool,
    /// Time spent before the first iteration (system matrix, EVD, precomputation).
    pub setup_ms: f64,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub beta: Array1<f64>,
    pub beta0: f64,
    pub trace: ConvergenceTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState {
    /// `â = ρ·a`, the scaled hinge auxiliary.
    pub a_hat: Array1<f64>,
    pub u: Array1<f64>,
    pub s: Array1<f64>,
    pub theta: Array1<f64>,
    pub b_vec: Array1<f64>,
}

/// Cold start: `â = 0`, `u = 0`. `dim` is the width of `Z` (features + 1).
pub fn initialize_state(n: usize, dim: usize) -> AdmmState {
    AdmmState {
        a_hat: Array1::zeros(n),
        u: Array1::zeros(n),
        s: Array1::zeros(dim),
        theta: Array1::zeros(n),
        b_vec: Array1::zeros(n),
    }
}

/// Proximal operator of `δ·x₊`: `argmin_x δ·x₊ + ½(x − θ)²`.
#[inline]
pub fn soft_threshold(theta: f64, delta: f64) -> f64 {
    if theta > delta {
        theta - delta
    } else if theta >= 0.0 {
        0.0
    } else {
        theta
    }
}

/// `A = [[λI + ρXᵀX, ρXᵀ1], [ρ1ᵀX, ρN]]`. The regularizer only touches the
/// feature block, never the bias.
pub fn build_system_matrix(
    design: &AugmentedDesign,
    lambda: f64,
    rho: f64,
) -> Result<SymmetricMatrix> {
    let dim = design.p() + 1;
    let gram = design.x_tilde.t().dot(&design.x_tilde);
    let mut a = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in i..dim {
            a[[i, j]] = rho * gram[[i, j]];
        }
        if i < dim - 1 {
            a[[i, i]] += lambda;
        }
    }
    SymmetricMatrix::from_upper(a)
}

/// `Z = Y X̃ Q D^{-1/2}`, which requires the full spectrum of `A` to be retained.
pub fn precompute_z(
    design: &AugmentedDesign,
    evd: &EvdResult,
    trunc: &SpectralTruncation,
) -> Result<Array2<f64>> {
    let dim = design.p() + 1;
    if evd.n() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: evd.n(),
        });
    }
    if trunc.rank_kept != dim {
        return Err(Error::RankDeficient(format!(
            "system matrix retains rank {} of {dim}; increase lambda or rho",
            trunc.rank_kept
        )));
    }
    let q_scaled = &evd.q * &trunc.inv_sqrt;
    Ok(design.signed().dot(&q_scaled))
}

fn check_finite(v: &Array1<f64>, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite() && x.abs() <= DIVERGENCE_LIMIT) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// One iteration of the fused update:
///
/// ```text
/// B = u + ρ1 − â
/// S = ZᵀB
/// θ = ρ1 + u − ρ·Z·S
/// â' = S₁(θ)
/// u' = θ − â'
/// ```
pub fn admm_step(z: &Array2<f64>, state: &AdmmState, rho: f64) -> Result<AdmmState> {
    let n = z.nrows();
    if state.u.len() != n || state.a_hat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.u.len(),
        });
    }
    let b_vec = &state.u + rho - &state.a_hat;
    let s = z.t().dot(&b_vec);
    let zs = z.dot(&s);
    let theta = rho + &state.u - &(zs * rho);
    let a_hat = theta.mapv(|t| soft_threshold(t, 1.0));
    let u = &theta - &a_hat;
    check_finite(&u, "ADMM multiplier")?;
    check_finite(&a_hat, "ADMM auxiliary")?;
    check_finite(&s, "ADMM projection")?;
    Ok(AdmmState {
        a_hat,
        u,
        s,
        theta,
        b_vec,
    })
}

/// Fraction of samples with the correct sign given `m_i = y_i · f(x_i)`.
fn accuracy_from_margins(margins: &Array1<f64>, y: &Array1<f64>) -> f64 {
    let correct = margins
        .iter()
        .zip(y.iter())
        .filter(|(&m, &yi)| {
            let f = yi * m;
            let pred = if f >= 0.0 { 1.0 } else { -1.0 };
            pred == yi
        })
        .count();
    correct as f64 / y.len() as f64
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

struct Setup {
    evd: EvdResult,
    trunc: SpectralTruncation,
}

fn decompose_system(design: &AugmentedDesign, cfg: &AdmmConfig) -> Result<Setup> {
    let a = build_system_matrix(design, cfg.lambda, cfg.rho)?;
    let evd = eigen::jacobi_evd_default(&a)?;
    let trunc = eigen::truncate_spectrum(&evd, evd.n(), eigen::DEFAULT_EIG_TOL)?;
    if trunc.rank_kept != evd.n() {
        return Err(Error::RankDeficient(format!(
            "system matrix retains rank {} of {}; increase lambda or rho",
            trunc.rank_kept,
            evd.n()
        )));
    }
    Ok(Setup { evd, trunc })
}

pub fn solve_linear(design: &AugmentedDesign, cfg: &AdmmConfig) -> Result<LinearModel> {
    cfg.validate()?;
    if design.n() < 2 || !design.has_both_classes() {
        return Err(Error::SingleClass);
    }
    match cfg.path {
        SolverPath::Efficient => solve_efficient(design, cfg),
        SolverPath::Reference => solve_reference(design, cfg),
    }
}

fn split_beta(beta_tilde: Array1<f64>, trace: ConvergenceTrace) -> LinearModel {
    let p = beta_tilde.len() - 1;
    let beta0 = beta_tilde[p];
    let beta = beta_tilde.slice(ndarray::s![..p]).to_owned();
    LinearModel { beta, beta0, trace }
}

fn solve_efficient(design: &AugmentedDesign, cfg: &AdmmConfig) -> Result<LinearModel> {
    let start = Instant::now();
    let setup = decompose_system(design, cfg)?;
    let z = precompute_z(design, &setup.evd, &setup.trunc)?;
    let rho = cfg.rho;
    let mut trace = ConvergenceTrace {
        setup_ms: elapsed_ms(start),
        ..Default::default()
    };

    let mut state = initialize_state(design.n(), z.ncols());
    for k in 1..=cfg.max_iters {
        let next = admm_step(&z, &state, rho)?;
        let u_residual = norm(&(&next.u - &state.u));
        // ‖Q D^{-1/2} ΔS‖ = ‖D^{-1/2} ΔS‖ since Q is orthogonal.
        let beta_residual = ((&next.s - &state.s) * &setup.trunc.inv_sqrt)
            .mapv(|x| x * x)
            .sum();
        let train_accuracy = if cfg.track_accuracy || cfg.target_accuracy.is_some() {
            // Z·S = Y X̃ β̃, recovered from θ without another product.
            let margins = (rho + &state.u - &next.theta) / rho;
            Some(accuracy_from_margins(&margins, &design.y))
        } else {
            None
        };
        trace.records.push(IterationRecord {
            iteration: k,
            u_residual,
            beta_residual,
            train_accuracy,
            elapsed_ms: elapsed_ms(start),
        });
        state = next;
        // u alone can stall (e.g. stay at zero) while β̃ is still moving.
        if u_residual <= cfg.epsilon && beta_residual <= cfg.epsilon {
            trace.converged = true;
            break;
        }
        if reached(cfg, train_accuracy) {
            trace.reached_target = true;
            break;
        }
    }

    let beta_tilde = setup.evd.q.dot(&(&state.s * &setup.trunc.inv_sqrt));
    Ok(split_beta(beta_tilde, trace))
}

fn reached(cfg: &AdmmConfig, acc: Option<f64>) -> bool {
    matches!((cfg.target_accuracy, acc), (Some(t), Some(a)) if a >= t)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn solve_reference(design: &AugmentedDesign, cfg: &AdmmConfig) -> Result<LinearModel> {
    let start = Instant::now();
    let setup = decompose_system(design, cfg)?;
    let a_inv = (&setup.evd.q * &setup.trunc.inv).dot(&setup.evd.q.t());
    let w = design.signed();
    let rho = cfg.rho;
    let n = design.n();
    let mut trace = ConvergenceTrace {
        setup_ms: elapsed_ms(start),
        ..Default::default()
    };

    let mut beta = Array1::<f64>::zeros(design.p() + 1);
    let mut a = Array1::<f64>::zeros(n);
    let mut u = Array1::<f64>::zeros(n);
    for k in 1..=cfg.max_iters {
        // (X̃ᵀY)(u − ρ(a − 1))
        let rhs = w.t().dot(&(&u + rho - &(&a * rho)));
        let next_beta = a_inv.dot(&rhs);
        let margins = w.dot(&next_beta);
        let next_a = (1.0 + &u / rho - &margins).mapv(|t| soft_threshold(t, 1.0 / rho));
        let next_u = &u + &((1.0 - &margins - &next_a) * rho);
        check_finite(&next_u, "ADMM multiplier")?;
        check_finite(&next_beta, "ADMM weights")?;

        let diff = &next_beta - &beta;
        let beta_residual = diff.dot(&diff);
        let u_residual = norm(&(&next_u - &u));
        let train_accuracy = if cfg.track_accuracy || cfg.target_accuracy.is_some() {
            Some(accuracy_from_margins(&margins, &design.y))
        } else {
            None
        };
        trace.records.push(IterationRecord {
            iteration: k,
            u_residual,
            beta_residual,
            train_accuracy,
            elapsed_ms: elapsed_ms(start),
        });
        beta = next_beta;
        a = next_a;
        u = next_u;
        if beta_residual <= cfg.epsilon {
            trace.converged = true;
            break;
        }
        if reached(cfg, train_accuracy) {
            trace.reached_target = true;
            break;
        }
    }
    Ok(split_beta(beta, trace))
}

/// Hinge-loss primal objective `Σ (1 − y_i(x_iᵀβ + β₀))₊ + λ/2 ‖β‖²`.
pub fn primal_objective(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    beta: ArrayView1<f64>,
    beta0: f64,
    lambda: f64,
) -> f64 {
    let f = x.dot(&beta) + beta0;
    let hinge: f64 = f
        .iter()
        .zip(y.iter())
        .map(|(fi, yi)| (1.0 - yi * fi).max(0.0))
        .sum();
    hinge + 0.5 * lambda * beta.dot(&beta)
}
