use thiserror::Error;

/// Errors raised by instance construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WtspError {
    #[error("invalid cost function: {0}")]
    InvalidCostFunction(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("solver requires a {expected} metric, instance has a {found} metric")]
    IncompatibleMetric {
        expected: &'static str,
        found: &'static str,
    },

    #[error("instance too large for {what}: n = {n}, limit = {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent cluster mapping: {0}")]
    InconsistentMapping(String),
}

pub type Result<T> = std::result::Result<T, WtspError>;
