use thiserror::Error;

/// Errors raised by code construction, the codec, the channel model and the
/// experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("invalid bit string: {0}")]
    Parse(String),

    #[error("threshold calibration failed: {0}")]
    Calibration(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
