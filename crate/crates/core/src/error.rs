use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is identically zero; no principal eigenvector exists")]
    DegenerateMatrix,

    #[error("power iteration did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate beam: {0}")]
    DegenerateBeam(&'static str),

    #[error("the proposed scheme requires a line-of-sight component (K > 0)")]
    NoLineOfSight,

    #[error("invalid gain statistics: {0}")]
    InvalidStats(String),

    #[error("quadrature did not reach the requested tolerance: estimate {estimate:e}, error bound {error_bound:e}")]
    Integration { estimate: f64, error_bound: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
