use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("multivalued gauge function: {0}")]
    MultivaluedGauge(String),
    #[error("singular potential at pole")]
    SingularAtPole,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("field file: {0}")]
    FieldFile(String),
    #[error("shell collapses through axis/origin: d = {d} >= 2R = {two_r}")]
    ShellCollapse { d: f64, two_r: f64 },
    #[error("extrapolation: {0}")]
    Extrapolation(String),
    #[error("eigensolver failed for `{label}`: {reason}")]
    Solver { label: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
