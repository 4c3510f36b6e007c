use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped by what went wrong rather than by module, so the CLI
/// can map each one onto a stable exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bad magic: expected \"ASV1\", found {0:?}")]
    Format([u8; 4]),

    #[error("truncated stream: need {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },

    #[error("invalid header: {0}")]
    InvalidHeader(String),

    #[error("invalid gate [{t0}, {t1}) for {nt} time samples")]
    Gate { t0: usize, t1: usize, nt: usize },

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid phantom spec: {0}")]
    Spec(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}
