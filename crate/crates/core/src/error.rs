use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CoxError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoxError {
    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("column {column} is constant and cannot be centered and scaled")]
    ConstantColumn { column: usize },

    #[error("exp(linear predictor) overflows for subject {subject} (eta = {eta})")]
    Overflow { subject: usize, eta: f64 },

    #[error("objective is not finite at column {column} after all step halvings (sweep {sweep})")]
    NonFiniteObjective { column: usize, sweep: usize },

    #[error("dataset has no events; the partial likelihood is constant")]
    NoEvents,

    #[error(
        "censoring target {target} is unreachable; calibration reached {achieved} \
         (achievable range [{min}, {max}])"
    )]
    Calibration {
        target: f64,
        achieved: f64,
        min: f64,
        max: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoxError {
    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        CoxError::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        CoxError::InvalidInput(message.into())
    }
}
