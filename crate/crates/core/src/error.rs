use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LsiError {
    /// A configuration value is outside its accepted range.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An argument does not match the data it is applied to.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The two independent routes of a cross-checked quantity disagree.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, LsiError>;

pub(crate) fn config_err(msg: impl Into<String>) -> LsiError {
    LsiError::Config(msg.into())
}
