use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FableError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("entry ({row}, {col}) = {value} lies outside [-1, 1]")]
    Domain { row: usize, col: usize, value: f64 },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate:e}, last change {last_change:e})")]
    NonConvergence {
        iterations: usize,
        last_estimate: f64,
        last_change: f64,
        last_iterate: Vec<f64>,
    },

    #[error("degenerate normalisation: {0}")]
    DegenerateNorm(String),

    #[error("circuit width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("resource guard exceeded: {0}")]
    Resource(String),

    #[error("infeasible nonzero count: {0}")]
    InfeasibleCount(String),

    #[error("rank-deficient regression: {0}")]
    RankDeficient(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

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
}

pub type Result<T> = std::result::Result<T, FableError>;

impl FableError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FableError::Io {
            path: path.into(),
            source,
        }
    }
}
