//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by estimators, test statistics, and data generators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on an argument was violated (non-finite input,
    /// nonpositive bandwidth, empty vector, odd dimension, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two inputs that must agree in length or shape do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The sample covariance is numerically singular; carries the offending
    /// (smallest) eigenvalue.
    #[error("ill-conditioned covariance: smallest eigenvalue {eigenvalue:.6e}")]
    IllConditionedCovariance { eigenvalue: f64 },

    /// A covariance matrix handed to the sampler is not positive definite.
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    /// The data admit no meaningful test statistic (e.g. a constant response
    /// leaves every squared residual at rounding noise, so the variance
    /// estimate collapses to zero).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A local-alternative draw produced a nonpositive conditional variance.
    #[error("nonpositive conditional variance at draw {index}")]
    NonPositiveVariance { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
