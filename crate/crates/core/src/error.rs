use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or probability outside the support of a distribution.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter or plan that violates a type invariant.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Input that cannot be summarised (e.g. an empty cohort).
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain_err(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
