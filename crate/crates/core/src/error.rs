use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its depth limit before meeting the tolerance.
    #[error("quadrature did not converge: best estimate {estimate}, error bound {error:e} exceeds tolerance {tol:e}")]
    Convergence {
        estimate: Complex64,
        error: f64,
        tol: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
