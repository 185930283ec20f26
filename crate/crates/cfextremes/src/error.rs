use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's domain (empty word, malformed interval, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A rigorous error bound crossed an integer boundary; no digit is emitted.
    #[error("precision exhausted: {0}")]
    Precision(String),
    /// An exact enumeration would exceed the configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A scan finished its horizon without finding the requested index.
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
