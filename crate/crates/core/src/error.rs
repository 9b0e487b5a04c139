use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A function produced a non-finite value.
    #[error("non-finite value {value} at x = {at}")]
    NonFinite { at: f64, value: f64 },
    /// Two grids that must agree do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// The requested accuracy cannot be reached within the quadrature or FFT budget.
    #[error("numerical budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
