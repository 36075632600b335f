use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const REPORT_SCHEMA: &str = "svm-admm.report/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub gamma: f64,
    pub lambda: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub c_box: f64,
    pub kkt_tol: f64,
    pub seed: u64,
    pub scale: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Timings {
    pub load_ms: f64,
    pub nystrom_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Paths {
    pub data: String,
    pub model: Option<String>,
    pub trace: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainSummary {
    pub schema: String,
    pub solver: String,
    pub n_train: usize,
    pub n_test: usize,
    pub p: usize,
    pub hyperparameters: Hyperparameters,
    /// Sampled columns; absent for SMO.
    pub c: Option<usize>,
    pub r: Option<usize>,
    pub effective_rank: Option<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub nonzero_alpha: usize,
    pub mse: Option<f64>,
    pub timings: Timings,
    pub paths: Paths,
}

/// One line of the convergence trace; residuals are empty for SMO passes.
#[derive(Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub u_residual: Option<f64>,
    pub beta_residual: Option<f64>,
    pub train_accuracy: Option<f64>,
    pub elapsed_ms: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::output(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value).map_err(|e| CliError::output(path, e))
}
