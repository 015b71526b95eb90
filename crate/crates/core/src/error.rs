use thiserror::Error;

use crate::geodesic::Sample;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A spacetime or solver was configured with unusable parameters.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// An event lies outside the chart domain of its spacetime.
    #[error("event {coords:?} lies outside the chart domain of {spacetime}")]
    Domain {
        spacetime: &'static str,
        coords: [f64; 4],
    },
    /// A geodesic left the chart domain; `last` is the final valid sample.
    #[error("trajectory left the chart domain at tau = {}", last.tau)]
    DomainExit { last: Box<Sample> },
    #[error("integration failed: {0}")]
    Integration(String),
    /// Arguments are individually valid but inconsistent with each other.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("Lorentz map is not orthochronous (Λ⁰₀ = {0})")]
    NonOrthochronous(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
