use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid data range: lower bound {lower} must be below upper bound {upper}")]
    InvalidRange { lower: f64, upper: f64 },

    #[error("dataset is empty")]
    EmptyData,

    #[error("invalid quantiles: {0}")]
    InvalidQuantiles(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("every log-weight is -inf; nothing to sample")]
    NoFiniteWeight,

    #[error("no feasible interval sequence at prefix length {prefix}")]
    Unsatisfiable { prefix: usize },

    #[error("enumeration guard exceeded: {size} items (limit {limit})")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("no smoothing parameter in the grid satisfies the privacy budget {epsilon}")]
    InfeasibleBudget { epsilon: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: column `{column}` not found")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: no parseable values")]
    NoParseableRows { path: PathBuf },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("calibration line {line}: {message}")]
    Calibration { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
