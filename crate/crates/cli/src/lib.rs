//! Command-line front end for the `svm-admm` crate.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid arguments or
//! configuration, 3 unreadable or malformed input data and I/O errors,
//! 4 solver stopped before converging, 5 malformed model file.

pub mod args;
mod bench;
mod datasets;
mod input;
mod predict;
mod report;
mod study;
mod train;

use std::path::PathBuf;

use svm_admm::{Error, Exec};

pub use args::Cli;
use args::Command;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Output { path: PathBuf, message: String },

    #[error("solver stopped after {iterations} iterations without converging (raise --max-iters or pass --allow-nonconverged)")]
    NotConverged { iterations: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Output { .. } => 3,
            CliError::NotConverged { .. } => 4,
            CliError::Core(e) => match e {
                Error::InvalidParameter(_) | Error::InvalidCount(_) => 2,
                Error::MalformedModelFile(_) => 5,
                Error::NonFinite(_) | Error::NoConvergence { .. } | Error::RankDeficient(_) => 1,
                Error::IndexOutOfRange { .. } | Error::DuplicateIndex(_) => 1,
                Error::DimensionMismatch { .. }
                | Error::InvalidLabel(_)
                | Error::SingleClass
                | Error::Parse { .. }
                | Error::MissingValue { .. }
                | Error::NotBinary { .. }
                | Error::NonAscendingIndex { .. }
                | Error::InsufficientClassSamples { .. }
                | Error::Io { .. }
                | Error::Stream(_) => 3,
            },
        }
    }

    pub(crate) fn output(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Output {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub(crate) struct Context {
    pub data_dir: PathBuf,
    pub exec: Exec,
}

impl Context {
    /// Relative paths that do not exist as given are looked up under the data directory.
    pub fn resolve(&self, path: &std::path::Path) -> PathBuf {
        if path.is_relative() && !path.exists() {
            let candidate = self.data_dir.join(path);
            if candidate.exists() {
                return candidate;
            }
        }
        path.to_path_buf()
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let ctx = Context {
        data_dir: cli.data_dir,
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };
    match cli.command {
        Command::Train(a) => train::run(&ctx, a),
        Command::Predict(a) => predict::run(&ctx, a),
        Command::ApproxStudy(a) => study::run(&ctx, a),
        Command::BenchConvergence(a) => bench::run(&ctx, a),
        Command::ExportMnist(a) => datasets::export_mnist(&ctx, a),
        Command::GenSynthetic(a) => datasets::gen_synthetic(a),
    }
}

/// Parse `"0,3,5-7"` into `[0, 3, 5, 6, 7]`, sorted and deduplicated.
pub fn parse_seed_list(spec: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::Usage(format!("invalid seed list {spec:?}; expected values such as 0,3,5-7"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
