use thiserror::Error;

/// Error type shared by every module of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature did not reach tolerance {target:e} (achieved {achieved:e})")]
    Quadrature { target: f64, achieved: f64 },

    #[error("input does not decay: tail magnitude {tail:e} relative to peak")]
    NonDecaying { tail: f64 },

    #[error("Neumann series diverges: contraction factor {factor:.4} >= 1")]
    NeumannDivergence { factor: f64 },

    #[error("operator is singular or near-singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("lambda tail not converged: window doubling changed result by {change:e}")]
    TailNotConverged { change: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
