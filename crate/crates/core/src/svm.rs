//! Nonlinear SVM training through the rank-reduced linear problem, inference,
//! and model persistence.
//!
//! Training factors `Ψ ≈ VVᵀ`, solves the linear SVM on `X' = YV` for weights
//! `η` and bias `b`, and maps `η` back to dual weights `α` supported on the
//! sampled subset `M`. The decision function is `Σ_i α_i y_i k(x_i, x) + b`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::admm::{self, AdmmConfig, AugmentedDesign, ConvergenceTrace, LinearModel};
use crate::data::{ScalingMode, ScalingRecord};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernel::{self, KernelParams};
use crate::linalg;
use crate::nystrom::{self, NystromConfig, NystromFactor};

/// Recovered weights at or below this magnitude are not stored.
pub const ALPHA_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    /// Row of the sample in the training set.
    pub index: usize,
    /// `α_i · y_i`
    pub alpha_weighted: f64,
    pub label: f64,
    pub features: Vec<f64>,
}

impl SupportVector {
    pub fn alpha(&self) -> f64 {
        self.alpha_weighted * self.label
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearModel {
    pub support: Vec<SupportVector>,
    pub bias: f64,
    pub kernel: KernelParams,
    /// Feature dimension expected at inference.
    pub dim: usize,
    /// Applied to raw inputs before kernel evaluation; support features are
    /// stored already transformed.
    #[serde(default)]
    pub scaling: Option<ScalingRecord>,
}

impl NonlinearModel {
    /// Build a model from a dense dual vector, keeping only non-negligible entries.
    pub fn from_dense_alpha(
        x: ArrayView2<f64>,
        y: ArrayView1<f64>,
        alpha: &Array1<f64>,
        bias: f64,
        kernel: KernelParams,
    ) -> Self {
        let support = alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() > ALPHA_ZERO_TOL)
            .map(|(i, &a)| SupportVector {
                index: i,
                alpha_weighted: a * y[i],
                label: y[i],
                features: x.row(i).to_vec(),
            })
            .collect();
        NonlinearModel {
            support,
            bias,
            kernel,
            dim: x.ncols(),
            scaling: None,
        }
    }

    /// Dual weights expanded to length `n`, zero off the support.
    pub fn dense_alpha(&self, n: usize) -> Array1<f64> {
        let mut alpha = Array1::zeros(n);
        for sv in &self.support {
            alpha[sv.index] = sv.alpha();
        }
        alpha
    }

    pub fn nonzero_alpha(&self) -> usize {
        self.support.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub model: NonlinearModel,
    pub trace: ConvergenceTrace,
    pub nystrom_mse: Option<f64>,
    pub train_accuracy: f64,
    pub factor: NystromFactor,
    /// Weights of the rank-reduced linear problem.
    pub eta: Array1<f64>,
    pub nystrom_ms: f64,
    pub solve_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrainOptions {
    pub exec: Exec,
    /// Materialize the full `Ψ` to report the approximation error.
    pub compute_mse: bool,
}

pub fn train_nonlinear(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    kernel: &KernelParams,
    nys: &NystromConfig,
    admm_cfg: &AdmmConfig,
) -> Result<TrainReport> {
    train_nonlinear_with(x, y, kernel, nys, admm_cfg, TrainOptions::default())
}

pub fn train_nonlinear_with(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    kernel: &KernelParams,
    nys: &NystromConfig,
    admm_cfg: &AdmmConfig,
    opts: TrainOptions,
) -> Result<TrainReport> {
    kernel::check_labels(&x, &y)?;
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    admm_cfg.validate()?;

    let start = Instant::now();
    let factor = nystrom::nystrom_factor_with(x, y, kernel, nys, opts.exec)?;
    let nystrom_ms = start.elapsed().as_secs_f64() * 1e3;

    let x_prime = &factor.v * &y.insert_axis(Axis(1));
    let design = AugmentedDesign::new(x_prime.view(), y)?;
    let linear = admm::solve_linear(&design, admm_cfg)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3 - nystrom_ms;

    let alpha_m = recover_alpha(&factor, &linear.beta)?;
    let support = factor
        .m
        .iter()
        .zip(alpha_m.iter())
        .filter(|(_, a)| a.abs() > ALPHA_ZERO_TOL)
        .map(|(&i, &a)| SupportVector {
            index: i,
            alpha_weighted: a * y[i],
            label: y[i],
            features: x.row(i).to_vec(),
        })
        .collect();
    let model = NonlinearModel {
        support,
        bias: linear.beta0,
        kernel: *kernel,
        dim: x.ncols(),
        scaling: None,
    };

    let train_accuracy = accuracy(&model, x, y)?;
    let nystrom_mse = if opts.compute_mse {
        let psi = kernel::build_kernel_matrix_with(x, y, kernel, opts.exec)?;
        Some(nystrom::approximation_mse(&psi, &factor)?)
    } else {
        None
    };
    let LinearModel { beta, trace, .. } = linear;
    Ok(TrainReport {
        model,
        trace,
        nystrom_mse,
        train_accuracy,
        factor,
        eta: beta,
        nystrom_ms,
        solve_ms,
    })
}

/// Dual weights on `M` solving `η = Vᵀα`.
///
/// On `M`, `Vᵀ` restricted to the sampled rows is `D^{1/2} Q_rᵀ`, so the
/// constraint reads `Q_rᵀ α_M = D^{-1/2} η`. When the retained rank equals
/// `|M|` the solution is unique, `α_M = Q_r D^{-1/2} η`. Otherwise a basic
/// solution supported on `effective_rank` well-conditioned rows of `Q_r` is
/// returned, which keeps the number of nonzero weights within the rank.
pub fn recover_alpha(factor: &NystromFactor, eta: &Array1<f64>) -> Result<Array1<f64>> {
    let k = factor.effective_rank;
    if eta.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: eta.len(),
        });
    }
    let c = factor.m.len();
    let g = eta / &factor.d_r.mapv(f64::sqrt);
    if k == c {
        return Ok(factor.q_r.dot(&g));
    }
    let rows = linalg::select_independent_rows(&factor.q_r);
    let block = factor.q_r.select(Axis(0), &rows);
    let sub = linalg::solve(block.t(), &g)?;
    let mut alpha = Array1::zeros(c);
    for (&r, &v) in rows.iter().zip(sub.iter()) {
        alpha[r] = v;
    }
    Ok(alpha)
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `sign(xᵀβ + β₀)` with `sign(0) = +1`.
pub fn predict_linear(model: &LinearModel, x: ArrayView1<f64>) -> Result<f64> {
    check_dim(model.beta.len(), x.len())?;
    Ok(sign(x.dot(&model.beta) + model.beta0))
}

/// `Σ α_i y_i k(x_i, x) + b` over the stored support.
pub fn decision_value(model: &NonlinearModel, x: ArrayView1<f64>) -> Result<f64> {
    check_dim(model.dim, x.len())?;
    if let Some(rec) = &model.scaling {
        let z = rec.apply_row(x);
        return Ok(kernel_sum(model, z.view()));
    }
    Ok(kernel_sum(model, x))
}

fn kernel_sum(model: &NonlinearModel, x: ArrayView1<f64>) -> f64 {
    let mut acc = 0.0;
    for sv in &model.support {
        acc += sv.alpha_weighted * model.kernel.eval_unchecked(ArrayView1::from(&sv.features), x);
    }
    acc + model.bias
}

pub fn predict_nonlinear(model: &NonlinearModel, x: ArrayView1<f64>) -> Result<f64> {
    decision_value(model, x).map(sign)
}

pub fn decision_values(model: &NonlinearModel, x: ArrayView2<f64>, exec: Exec) -> Result<Array1<f64>> {
    check_dim(model.dim, x.ncols())?;
    let vals = exec.map(x.nrows(), |i| decision_value(model, x.row(i)).unwrap_or(f64::NAN));
    Ok(Array1::from(vals))
}

/// Fraction of rows of `x` whose predicted label matches `y`.
pub fn accuracy(model: &NonlinearModel, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<f64> {
    check_dim(x.nrows(), y.len())?;
    let f = decision_values(model, x, Exec::default())?;
    let correct = f
        .iter()
        .zip(y.iter())
        .filter(|(&fi, &yi)| sign(fi) == yi)
        .count();
    Ok(correct as f64 / y.len().max(1) as f64)
}

pub fn linear_accuracy(model: &LinearModel, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<f64> {
    check_dim(x.nrows(), y.len())?;
    let mut correct = 0;
    for (row, &yi) in x.rows().into_iter().zip(y.iter()) {
        if predict_linear(model, row)? == yi {
            correct += 1;
        }
    }
    Ok(correct as f64 / y.len().max(1) as f64)
}

/// Hinge primal in dual-weight form: `Σ (1 − y_i f(x_i))₊ + λ/2 αᵀΨα`.
pub fn kernel_objective(
    model: &NonlinearModel,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
) -> Result<f64> {
    let f = decision_values(model, x, Exec::default())?;
    let hinge: f64 = f
        .iter()
        .zip(y.iter())
        .map(|(fi, yi)| (1.0 - yi * fi).max(0.0))
        .sum();
    let mut reg = 0.0;
    for a in &model.support {
        for b in &model.support {
            reg += a.alpha_weighted
                * b.alpha_weighted
                * model.kernel.eval_unchecked(
                    ArrayView1::from(&a.features),
                    ArrayView1::from(&b.features),
                );
        }
    }
    Ok(hinge + 0.5 * lambda * reg)
}

// Binary model container, all fields little-endian:
//
//   magic          8 bytes  "SVMADMM\0"
//   version        u32      MODEL_FORMAT_VERSION
//   gamma          f64
//   bias           f64
//   dim            u64      feature dimension
//   scaling        u8       0 none, 1 min-max, 2 z-score, 3 identity
//   [offset dim × f64, scale dim × f64]   present when scaling != 0
//   count          u64      number of support entries
//   count × { index u64, alpha_weighted f64, label f64, features dim × f64 }
pub const MODEL_MAGIC: &[u8; 8] = b"SVMADMM\0";
pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn save_model<W: Write>(model: &NonlinearModel, mut sink: W) -> Result<()> {
    sink.write_all(MODEL_MAGIC)?;
    sink.write_all(&MODEL_FORMAT_VERSION.to_le_bytes())?;
    sink.write_all(&model.kernel.gamma().to_le_bytes())?;
    sink.write_all(&model.bias.to_le_bytes())?;
    sink.write_all(&(model.dim as u64).to_le_bytes())?;
    match &model.scaling {
        None => sink.write_all(&[0])?,
        Some(rec) => {
            if rec.offset.len() != model.dim || rec.scale.len() != model.dim {
                return Err(Error::DimensionMismatch {
                    expected: model.dim,
                    found: rec.offset.len(),
                });
            }
            let tag = match rec.mode {
                ScalingMode::MinMaxUnit => 1u8,
                ScalingMode::ZScore => 2,
                ScalingMode::None => 3,
            };
            sink.write_all(&[tag])?;
            for v in rec.offset.iter().chain(rec.scale.iter()) {
                sink.write_all(&v.to_le_bytes())?;
            }
        }
    }
    sink.write_all(&(model.support.len() as u64).to_le_bytes())?;
    for sv in &model.support {
        if sv.features.len() != model.dim {
            return Err(Error::DimensionMismatch {
                expected: model.dim,
                found: sv.features.len(),
            });
        }
        sink.write_all(&(sv.index as u64).to_le_bytes())?;
        sink.write_all(&sv.alpha_weighted.to_le_bytes())?;
        sink.write_all(&sv.label.to_le_bytes())?;
        for f in &sv.features {
            sink.write_all(&f.to_le_bytes())?;
        }
    }
    sink.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => {
                Error::MalformedModelFile(format!("truncated while reading {what}"))
            }
            _ => Error::Stream(e),
        })?;
        Ok(buf)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(what)?))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let v = f64::from_le_bytes(self.bytes(what)?);
        if !v.is_finite() {
            return Err(Error::MalformedModelFile(format!("non-finite {what}")));
        }
        Ok(v)
    }
}

pub fn load_model<R: Read>(source: R) -> Result<NonlinearModel> {
    let mut cur = Cursor { inner: source };
    let magic: [u8; 8] = cur.bytes("magic")?;
    if &magic != MODEL_MAGIC {
        return Err(Error::MalformedModelFile("bad magic header".into()));
    }
    let version = cur.u32("version")?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::MalformedModelFile(format!(
            "unsupported format version {version}"
        )));
    }
    let gamma = cur.f64("gamma")?;
    let kernel = KernelParams::new(gamma)
        .map_err(|_| Error::MalformedModelFile(format!("invalid gamma {gamma}")))?;
    let bias = cur.f64("bias")?;
    let dim = cur.u64("dimension")? as usize;
    let [tag] = cur.bytes::<1>("scaling tag")?;
    let mode = match tag {
        0 => None,
        1 => Some(ScalingMode::MinMaxUnit),
        2 => Some(ScalingMode::ZScore),
        3 => Some(ScalingMode::None),
        other => return Err(Error::MalformedModelFile(format!("unknown scaling tag {other}"))),
    };
    let scaling = match mode {
        None => None,
        Some(mode) => {
            let mut read = |what| (0..dim).map(|_| cur.f64(what)).collect::<Result<Vec<_>>>();
            let offset = read("scaling offset")?;
            let scale = read("scaling factor")?;
            Some(ScalingRecord { mode, offset, scale })
        }
    };
    let count = cur.u64("support count")? as usize;
    let mut support = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let index = cur.u64("support index")? as usize;
        let alpha_weighted = cur.f64("support weight")?;
        let label = cur.f64("support label")?;
        if label != 1.0 && label != -1.0 {
            return Err(Error::MalformedModelFile(format!("invalid label {label}")));
        }
        let features = (0..dim)
            .map(|_| cur.f64("support features"))
            .collect::<Result<Vec<_>>>()?;
        support.push(SupportVector {
            index,
            alpha_weighted,
            label,
            features,
        });
    }
    let mut trailing = [0u8; 1];
    if cur.inner.read(&mut trailing)? != 0 {
        return Err(Error::MalformedModelFile("trailing bytes after support list".into()));
    }
    Ok(NonlinearModel {
        support,
        bias,
        kernel,
        dim,
        scaling,
    })
}

#[derive(Serialize, Deserialize)]
struct JsonModel {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: NonlinearModel,
}

const JSON_FORMAT: &str = "svm-admm.model";

pub fn save_model_json<W: Write>(model: &NonlinearModel, sink: W) -> Result<()> {
    let doc = JsonModel {
        format: JSON_FORMAT.into(),
        version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    };
    serde_json::to_writer_pretty(sink, &doc)
        .map_err(|e| Error::MalformedModelFile(e.to_string()))
}

pub fn load_model_json<R: Read>(source: R) -> Result<NonlinearModel> {
    let doc: JsonModel =
        serde_json::from_reader(source).map_err(|e| Error::MalformedModelFile(e.to_string()))?;
    if doc.format != JSON_FORMAT || doc.version != MODEL_FORMAT_VERSION {
        return Err(Error::MalformedModelFile(format!(
            "unsupported model document {} v{}",
            doc.format, doc.version
        )));
    }
    let m = doc.model;
    KernelParams::new(m.kernel.gamma())
        .map_err(|_| Error::MalformedModelFile("invalid gamma".into()))?;
    if m.support.iter().any(|sv| sv.features.len() != m.dim) {
        return Err(Error::MalformedModelFile("support feature length mismatch".into()));
    }
    if let Some(rec) = &m.scaling {
        if rec.offset.len() != m.dim || rec.scale.len() != m.dim {
            return Err(Error::MalformedModelFile("scaling length mismatch".into()));
        }
    }
    Ok(m)
}

/// Write `model` to `path`; a `.json` extension selects the text variant.
pub fn save_model_to_path(model: &NonlinearModel, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let w = BufWriter::new(file);
    if path.extension().is_some_and(|e| e == "json") {
        save_model_json(model, w)
    } else {
        save_model(model, w)
    }
}

/// Read a model written by [`save_model_to_path`], sniffing the format.
pub fn load_model_from_path(path: &Path) -> Result<NonlinearModel> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.first() == Some(&b'{') {
        load_model_json(bytes.as_slice())
    } else {
        load_model(bytes.as_slice())
    }
}
