use std::path::PathBuf;

use crate::eigen::EvdResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        /// Best-effort decomposition at the point the sweep budget ran out.
        best: Box<EvdResult>,
    },

    #[error("matrix is numerically rank deficient: {0}")]
    RankDeficient(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("labels must be -1 or +1, found {0}")]
    InvalidLabel(f64),

    #[error("training set contains a single class")]
    SingleClass,

    #[error("malformed model file: {0}")]
    MalformedModelFile(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: line {line}, column {column}: missing value")]
    MissingValue {
        path: PathBuf,
        line: usize,
        column: usize,
    },

    #[error("{path}: expected a binary label set, found {found} distinct labels")]
    NotBinary { path: PathBuf, found: usize },

    #[error("{path}: line {line}: feature indices must be strictly ascending")]
    NonAscendingIndex { path: PathBuf, line: usize },

    #[error("class {label} has {count} samples; at least {required} required for the split")]
    InsufficientClassSamples {
        label: f64,
        count: usize,
        required: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
