use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: &'static str, message: String },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] qft_calculus::Error),
}

impl CliError {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Config {
            field,
            message: message.into(),
        }
    }

    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Core(_) => 1,
            CliError::Input { .. } | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
