use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible targets: {0}")]
    Infeasible(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
