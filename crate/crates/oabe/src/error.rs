//! Error type shared across the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by dataset handling, estimation, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient data: {rows} usable rows, need at least {min}")]
    InsufficientData { rows: usize, min: usize },

    #[error("column '{0}' is not numeric")]
    UnsupportedColumn(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unknown method '{0}' (valid: oabe, abe, lse, mlfe, rtm, ga)")]
    UnknownMethod(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
