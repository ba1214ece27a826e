use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("elliptic integral has no real value at phi = {phi}, m = {m}")]
    EllipticDomain { phi: f64, m: f64 },

    #[error("degenerate LoS fit: {0}")]
    DegenerateFit(String),

    #[error("quadrature did not converge: error estimate {error:.3e} after {subdivisions} subdivisions")]
    NonConvergence { error: f64, subdivisions: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("input lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
