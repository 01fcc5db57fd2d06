use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable as a finite `f64`.
    #[error("range error: value overflows at argument {argument}")]
    Range { argument: f64 },

    /// The operation was called with parameters it does not support.
    #[error("usage error: {0}")]
    Usage(String),

    /// A grid is too small to hold the mass of a window or test function.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// `W ∗ g_a²` (or a related Gaussian integral) diverges.
    #[error("non-integrable smoothing: {0}")]
    NonIntegrable(String),

    /// A certificate inequality failed on its verification sample, or the
    /// certificate is not valid at the requested parameters.
    #[error("certificate failure: {0}")]
    Certificate(String),

    /// The discretization does not resolve the requested energy window.
    #[error("resolution failure: {0}")]
    Resolution(String),

    /// An iterative method did not converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A numerical contract (identity residual, sandwich inequality) failed.
    #[error("numerical contract violated: {0}")]
    Contract(String),
}
