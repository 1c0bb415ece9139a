use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the evaluators and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("{what}: size {size} exceeds the exhaustive limit {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative solver ran out of budget. `lower` and `upper` bracket
    /// the quantity being computed at the point the solver stopped.
    #[error("{what} did not converge after {iterations} iterations (bracket [{lower}, {upper}])")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path:?}: {message}")]
    Io { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
