use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type.
///
/// Numeric failures (domain, overflow, convergence, quadrature) are kept
/// distinct from configuration failures so callers can map them to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("series did not converge after {terms} terms (last step {last_step:e})")]
    NonConvergence { terms: usize, last_step: f64 },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("quadrature stalled at error {err:e} after {subdivisions} subdivisions")]
    Quadrature { err: f64, subdivisions: usize },

    #[error("pole: {0}")]
    Pole(String),

    #[error("invalid channel spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad
    /// inputs or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Overflow(_)
                | Error::NonConvergence { .. }
                | Error::Divergence(_)
                | Error::Quadrature { .. }
                | Error::Pole(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
