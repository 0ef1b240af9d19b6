use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = UcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum UcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("instance failed validation:\n{0}")]
    Validation(ValidationReport),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("invalid synthetic parameters: {0}")]
    Synthetic(String),

    #[error("invalid commitment: {0}")]
    InvalidCommitment(String),

    #[error("no feasible schedule: {0}")]
    Infeasible(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("QP solver failed: {0}")]
    Qp(String),
}

impl From<serde_json::Error> for UcError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            return UcError::Io(e.into());
        }
        UcError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
