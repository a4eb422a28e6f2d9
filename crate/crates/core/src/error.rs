use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
