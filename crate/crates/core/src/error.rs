use thiserror::Error;

/// Failure modes shared by every module of the library.
///
/// The three variants map onto the runner's exit-code taxonomy: bad input
/// (`Validation`, `Config`) versus a computation that could not be carried out
/// (`Numerical`).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
