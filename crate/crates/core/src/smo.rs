//! Platt's sequential minimal optimization for the soft-margin dual
//!
//! ```text
//! max_α  Σα_i − ½ ΣΣ α_i α_j y_i y_j k(x_i, x_j)
//! s.t.   0 ≤ α_i ≤ C,  Σ α_i y_i = 0
//! ```
//!
//! Serves as a correctness oracle on small problems and as the convergence
//! baseline for the ADMM trainer. The decision function is
//! `f(x) = Σ α_i y_i k(x_i, x) + b`.

use std::time::Instant;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{check_labels, KernelParams};
use crate::svm::NonlinearModel;

/// Source of Gram matrix entries `k(x_i, x_j)`.
pub trait Gram {
    fn len(&self) -> usize;
    fn eval(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct RbfGram<'a> {
    x: ArrayView2<'a, f64>,
    params: KernelParams,
}

impl<'a> RbfGram<'a> {
    pub fn new(x: ArrayView2<'a, f64>, params: KernelParams) -> Self {
        RbfGram { x, params }
    }
}

impl Gram for RbfGram<'_> {
    fn len(&self) -> usize {
        self.x.nrows()
    }

    fn eval(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            self.params.eval_unchecked(self.x.row(i), self.x.row(j))
        }
    }
}

/// Plain inner products; lets SMO solve the linear primal as an oracle.
pub struct LinearGram<'a> {
    x: ArrayView2<'a, f64>,
}

impl<'a> LinearGram<'a> {
    pub fn new(x: ArrayView2<'a, f64>) -> Self {
        LinearGram { x }
    }
}

impl Gram for LinearGram<'_> {
    fn len(&self) -> usize {
        self.x.nrows()
    }

    fn eval(&self, i: usize, j: usize) -> f64 {
        self.x.row(i).dot(&self.x.row(j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoConfig {
    /// Box constraint `C`.
    pub c_box: f64,
    pub kkt_tol: f64,
    /// Cap on outer-loop passes.
    pub max_passes: usize,
    pub seed: u64,
    /// Maintain `E_i = f(x_i) − y_i` for every sample instead of recomputing it.
    pub error_cache: bool,
    /// Stop once the training accuracy reaches this fraction.
    pub target_accuracy: Option<f64>,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            c_box: 10.0,
            kkt_tol: 1e-3,
            max_passes: 10_000,
            seed: 0,
            error_cache: true,
            target_accuracy: None,
        }
    }
}

impl SmoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_box > 0.0) || !(self.kkt_tol > 0.0) || self.max_passes == 0 {
            return Err(Error::InvalidParameter(format!(
                "SMO needs c_box > 0, kkt_tol > 0 and max_passes >= 1 (got {}, {}, {})",
                self.c_box, self.kkt_tol, self.max_passes
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoPassRecord {
    pub pass: usize,
    /// Successful pair updates so far.
    pub steps: usize,
    pub dual_objective: f64,
    pub max_kkt_violation: f64,
    pub train_accuracy: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SmoTrace {
    pub records: Vec<SmoPassRecord>,
    pub converged: bool,
    pub reached_target: bool,
    /// Wall-clock at which the target accuracy was first observed.
    pub target_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoResult {
    pub alpha: Array1<f64>,
    pub b: f64,
    pub steps: usize,
    pub max_kkt_violation: f64,
    pub trace: SmoTrace,
}

impl SmoResult {
    pub fn into_model(self, x: ArrayView2<f64>, y: ArrayView1<f64>, kernel: KernelParams) -> NonlinearModel {
        NonlinearModel::from_dense_alpha(x, y, &self.alpha, self.b, kernel)
    }
}

pub fn smo_train(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    kernel: &KernelParams,
    cfg: &SmoConfig,
) -> Result<SmoResult> {
    check_labels(&x, &y)?;
    smo_train_gram(&RbfGram::new(x, *kernel), y, cfg)
}

pub fn smo_train_gram<G: Gram>(gram: &G, y: ArrayView1<f64>, cfg: &SmoConfig) -> Result<SmoResult> {
    cfg.validate()?;
    if gram.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: gram.len(),
            found: y.len(),
        });
    }
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    let mut solver = Solver::new(gram, y, cfg);
    solver.run();
    Ok(solver.finish())
}

/// Dual objective `Σα − ½ αᵀ(yyᵀ∘K)α`, evaluated directly.
pub fn dual_objective<G: Gram>(gram: &G, y: ArrayView1<f64>, alpha: &Array1<f64>) -> f64 {
    let n = gram.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if alpha[j] != 0.0 {
                quad += alpha[i] * alpha[j] * y[i] * y[j] * gram.eval(i, j);
            }
        }
    }
    alpha.sum() - 0.5 * quad
}

struct Solver<'a, G: Gram> {
    gram: &'a G,
    y: ArrayView1<'a, f64>,
    cfg: &'a SmoConfig,
    alpha: Array1<f64>,
    b: f64,
    errors: Vec<f64>,
    rng: ChaCha8Rng,
    steps: usize,
    trace: SmoTrace,
    start: Instant,
    done: bool,
}

const ALPHA_EPS: f64 = 1e-8;
const STEP_EPS: f64 = 1e-10;

impl<'a, G: Gram> Solver<'a, G> {
    fn new(gram: &'a G, y: ArrayView1<'a, f64>, cfg: &'a SmoConfig) -> Self {
        let n = gram.len();
        Solver {
            gram,
            y,
            cfg,
            alpha: Array1::zeros(n),
            b: 0.0,
            // f ≡ 0 at α = 0, b = 0.
            errors: y.iter().map(|v| -v).collect(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            steps: 0,
            trace: SmoTrace::default(),
            start: Instant::now(),
            done: false,
        }
    }

    fn n(&self) -> usize {
        self.alpha.len()
    }

    fn c(&self) -> f64 {
        self.cfg.c_box
    }

    fn error(&self, i: usize) -> f64 {
        if self.cfg.error_cache {
            return self.errors[i];
        }
        let mut f = self.b;
        for j in 0..self.n() {
            if self.alpha[j] != 0.0 {
                f += self.alpha[j] * self.y[j] * self.gram.eval(j, i);
            }
        }
        f - self.y[i]
    }

    fn all_errors(&self) -> Vec<f64> {
        if self.cfg.error_cache {
            self.errors.clone()
        } else {
            (0..self.n()).map(|i| self.error(i)).collect()
        }
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c()
    }

    fn violation(&self, i: usize, e: f64) -> f64 {
        let r = self.y[i] * e;
        let a = self.alpha[i];
        if a <= 0.0 {
            (-r).max(0.0)
        } else if a >= self.c() {
            r.max(0.0)
        } else {
            r.abs()
        }
    }

    fn accuracy_from(&self, errors: &[f64]) -> f64 {
        let correct = errors
            .iter()
            .zip(self.y.iter())
            .filter(|(&e, &yi)| {
                let f = e + yi;
                (if f >= 0.0 { 1.0 } else { -1.0 }) == yi
            })
            .count();
        correct as f64 / self.n() as f64
    }

    fn check_target(&mut self) {
        if let Some(t) = self.cfg.target_accuracy {
            if self.accuracy_from(&self.errors) >= t {
                self.trace.reached_target = true;
                self.trace.target_ms = Some(self.start.elapsed().as_secs_f64() * 1e3);
                self.done = true;
            }
        }
    }

    fn run(&mut self) {
        let n = self.n();
        let mut examine_all = true;
        let mut pass = 0;
        loop {
            let mut changed = 0;
            let order: Vec<usize> = if examine_all {
                (0..n).collect()
            } else {
                (0..n).filter(|&i| self.is_free(i)).collect()
            };
            for i in order {
                if self.examine(i) {
                    changed += 1;
                    if self.cfg.error_cache {
                        self.check_target();
                    }
                }
                if self.done {
                    break;
                }
            }
            pass += 1;
            self.record(pass);
            if !self.cfg.error_cache && !self.done {
                if let Some(t) = self.cfg.target_accuracy {
                    if self.trace.records.last().is_some_and(|r| r.train_accuracy >= t) {
                        self.trace.reached_target = true;
                        self.trace.target_ms = Some(self.start.elapsed().as_secs_f64() * 1e3);
                        self.done = true;
                    }
                }
            }
            if self.done || pass >= self.cfg.max_passes {
                break;
            }
            if examine_all {
                if changed == 0 {
                    // No pair can improve the dual; any violation left is down to
                    // the threshold, which the pair updates only set locally.
                    if self.refit_bias() {
                        continue;
                    }
                    break;
                }
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
    }

    fn record(&mut self, pass: usize) {
        let errors = self.all_errors();
        // Σα_i y_i (f_i − b) = αᵀ(yyᵀ∘K)α
        let quad: f64 = (0..self.n())
            .map(|i| self.alpha[i] * self.y[i] * (errors[i] + self.y[i] - self.b))
            .sum();
        let max_kkt_violation = (0..self.n())
            .map(|i| self.violation(i, errors[i]))
            .fold(0.0, f64::max);
        let rec = SmoPassRecord {
            pass,
            steps: self.steps,
            dual_objective: self.alpha.sum() - 0.5 * quad,
            max_kkt_violation,
            train_accuracy: self.accuracy_from(&errors),
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        };
        self.trace.records.push(rec);
    }

    /// Reset `b` to the value implied by the KKT conditions: the mean over free
    /// multipliers, or the midpoint of the feasible interval when none are free.
    /// Returns true when this reduced the worst violation.
    fn refit_bias(&mut self) -> bool {
        let errors = self.all_errors();
        let worst = |b_shift: f64| {
            (0..self.n())
                .map(|i| self.violation(i, errors[i] + b_shift))
                .fold(0.0, f64::max)
        };
        let before = worst(0.0);
        if before <= self.cfg.kkt_tol {
            return false;
        }
        // g_i = f(x_i) − b; the condition on sample i bounds b through y_i − g_i.
        let target: Vec<f64> = (0..self.n()).map(|i| self.b - errors[i]).collect();
        let free: Vec<usize> = (0..self.n()).filter(|&i| self.is_free(i)).collect();
        let b_new = if !free.is_empty() {
            free.iter().map(|&i| target[i]).sum::<f64>() / free.len() as f64
        } else {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..self.n() {
                // α = 0 needs y f ≥ 1, α = C needs y f ≤ 1.
                let at_zero = self.alpha[i] <= 0.0;
                if (self.y[i] > 0.0) == at_zero {
                    lo = lo.max(target[i]);
                } else {
                    hi = hi.min(target[i]);
                }
            }
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo,
                (false, true) => hi,
                (false, false) => self.b,
            }
        };
        let db = b_new - self.b;
        if !(worst(db) < before) {
            return false;
        }
        self.b = b_new;
        if self.cfg.error_cache {
            self.errors.iter_mut().for_each(|e| *e += db);
        }
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let e2 = self.error(i2);
        let r2 = e2 * self.y[i2];
        let a2 = self.alpha[i2];
        let tol = self.cfg.kkt_tol;
        if !((r2 < -tol && a2 < self.c()) || (r2 > tol && a2 > 0.0)) {
            return false;
        }
        let n = self.n();
        let free: Vec<usize> = (0..n).filter(|&i| self.is_free(i)).collect();
        if free.len() > 1 {
            let mut best = None;
            let mut gap = -1.0;
            for &i in &free {
                let g = (self.error(i) - e2).abs();
                if g > gap {
                    gap = g;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2, e2) {
                    return true;
                }
            }
        }
        if !free.is_empty() {
            let offset = self.rng.random_range(0..free.len());
            for k in 0..free.len() {
                let i1 = free[(offset + k) % free.len()];
                if self.take_step(i1, i2, e2) {
                    return true;
                }
            }
        }
        let offset = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (offset + k) % n;
            if self.take_step(i1, i2, e2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize, e2: f64) -> bool {
        if i1 == i2 {
            return false;
        }
        let c = self.c();
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let e1 = self.error(i1);
        let s = y1 * y2;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a2 + a1 - c).max(0.0), (a2 + a1).min(c))
        };
        if hi - lo <= ALPHA_EPS * c {
            return false;
        }
        let k11 = self.gram.eval(i1, i1);
        let k12 = self.gram.eval(i1, i2);
        let k22 = self.gram.eval(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;

        let mut a2_new = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // Degenerate curvature: move to the better end of the segment.
            let f1 = y1 * (e1 - self.b) - a1 * k11 - s * a2 * k12;
            let f2 = y2 * (e2 - self.b) - s * a1 * k12 - a2 * k22;
            let obj = |t: f64| {
                let t1 = a1 + s * (a2 - t);
                t1 * f1 + t * f2 + 0.5 * t1 * t1 * k11 + 0.5 * t * t * k22 + s * t * t1 * k12
            };
            let (lo_obj, hi_obj) = (obj(lo), obj(hi));
            if lo_obj < hi_obj - STEP_EPS {
                lo
            } else if lo_obj > hi_obj + STEP_EPS {
                hi
            } else {
                a2
            }
        };
        if a2_new < ALPHA_EPS * c {
            a2_new = 0.0;
        } else if a2_new > c - ALPHA_EPS * c {
            a2_new = c;
        }
        if (a2_new - a2).abs() < STEP_EPS * (a2_new + a2 + STEP_EPS) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        if a1_new < ALPHA_EPS * c {
            a1_new = 0.0;
        } else if a1_new > c - ALPHA_EPS * c {
            a1_new = c;
        }

        let d1 = y1 * (a1_new - a1);
        let d2 = y2 * (a2_new - a2);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let b_new = if a1_new > 0.0 && a1_new < c {
            b1
        } else if a2_new > 0.0 && a2_new < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = b_new - self.b;

        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.b = b_new;
        if self.cfg.error_cache {
            for i in 0..self.n() {
                self.errors[i] += d1 * self.gram.eval(i1, i) + d2 * self.gram.eval(i2, i) + db;
            }
        }
        self.steps += 1;
        true
    }

    fn finish(mut self) -> SmoResult {
        let errors = self.all_errors();
        let max_kkt_violation = (0..self.n())
            .map(|i| self.violation(i, errors[i]))
            .fold(0.0, f64::max);
        self.trace.converged = max_kkt_violation <= self.cfg.kkt_tol;
        SmoResult {
            alpha: self.alpha,
            b: self.b,
            steps: self.steps,
            max_kkt_violation,
            trace: self.trace,
        }
    }
}
