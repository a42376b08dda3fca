use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (non-finite angle, W = 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Caller violated an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical quantity could not be formed (e.g. a zero denominator).
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
