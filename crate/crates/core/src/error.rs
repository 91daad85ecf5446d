use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is inside the domain but outside the supported evaluation range.
    #[error("range error: {0}")]
    Range(String),

    /// The call is not meaningful for the given configuration.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The integral route refuses orders whose kernel frequency outruns the grid.
    #[error("order alpha = {alpha} is near-singular (|sin alpha| = {sin_abs:.3e} < {s_min}); use the spectral route")]
    NearSingular { alpha: f64, sin_abs: f64, s_min: f64 },

    /// A quadrature grid failed its weighted-Gaussian calibration identity.
    #[error("grid calibration failed: relative residual {residual:.3e} exceeds {tolerance:.1e}")]
    Calibration { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got { Ok(()) } else { Err(Error::DimensionMismatch { expected, got }) }
}
