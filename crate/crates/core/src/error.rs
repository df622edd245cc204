use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "perturbation radius L = {radius} exceeds the admissible bound {bound:.6} ({which})"
    )]
    PerturbationTooLarge {
        radius: f64,
        bound: f64,
        which: &'static str,
    },

    #[error("finite section is numerically degenerate: smallest eigenvalue {lambda_min:e} (tolerance {tolerance:e})")]
    DegenerateSection { lambda_min: f64, tolerance: f64 },

    #[error("Gram matrix is not positive definite at working precision (n = {n}, alpha = {alpha}): {detail}")]
    NotPositiveDefinite { n: usize, alpha: f64, detail: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("node index ({0}, {1}) is not part of the node set")]
    UnknownNode(i64, i64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
