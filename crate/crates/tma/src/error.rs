use thiserror::Error;

/// Errors raised by the library. Configuration and I/O problems are kept
/// separate from numeric failures so the CLI can map them to distinct exit
/// codes.
#[derive(Debug, Error)]
pub enum TmaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TmaError>;

impl TmaError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        TmaError::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        TmaError::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        TmaError::Numeric(msg.into())
    }
}
