use thiserror::Error;

/// Errors produced by the numerical and exact routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Input outside the domain an operation supports.
    #[error("domain error: {0}")]
    Domain(String),

    /// Branch points too close together relative to the curve diameter.
    #[error("ill-conditioned curve: {0}")]
    Conditioning(String),

    /// Quadrature did not reach the requested accuracy within the node cap.
    #[error("precision not reached: {0}")]
    Precision(String),

    /// A theta or lattice sum would exceed its truncation cap.
    #[error("truncation cap exceeded: {0}")]
    Truncation(String),

    /// A numerical diagnostic (extrapolation, basis tracking, convergence) failed.
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    /// File or document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
