use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path} at line {line}, column {column}: {message}")]
    Json { path: PathBuf, line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dqlab_core::Error),
    #[error("report is empty")]
    EmptyReport,
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    /// `2` for user errors, `3` for numerical and output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Json { .. } | CliError::Config(_) => 2,
            CliError::Core(dqlab_core::Error::Validation(_) | dqlab_core::Error::Config(_)) => 2,
            CliError::Core(dqlab_core::Error::Numerical(_)) => 3,
            CliError::EmptyReport | CliError::Write { .. } => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
