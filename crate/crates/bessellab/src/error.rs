//! Error type shared by all library modules.

/// Errors produced by kernel evaluation, quadrature and the verification
/// drivers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The argument is valid but the result is not representable in f64
    /// (use a scaled variant instead).
    #[error("range error: {0}")]
    Range(String),

    /// The argument is valid but outside the range this implementation
    /// supports by policy.
    #[error("unsupported range: {0}")]
    UnsupportedRange(String),

    /// A quadrature or iteration failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An integral was detected to diverge.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// A malformed input object (schedule, sample, configuration).
    #[error("input error: {0}")]
    Input(String),

    /// Textual grammar error with a byte position into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn divergent(msg: impl Into<String>) -> Self {
        Error::Divergent(msg.into())
    }
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
