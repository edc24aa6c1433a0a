use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not anti-Hermitian (max |K + K^dag| = {deviation:e})")]
    NotAntiHermitian { deviation: f64 },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    #[error("{what} = {value} out of range: {allowed}")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    /// Hamiltonian builders only accept phi = 0.
    #[error("squeezing phase phi = {phi} is not supported here (requires phi = 0)")]
    PhaseNotSupported { phi: f64 },

    /// Beyond the normal-phase (or superradiant-phase) domain of a closed form.
    #[error("unphysical regime: {0}")]
    UnphysicalRegime(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Sweep configuration failure, carrying the offending key path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("config error at `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}
