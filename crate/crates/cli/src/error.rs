use std::path::PathBuf;

use thiserror::Error;

/// Everything that makes a run unusable, as opposed to a failed verdict.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{what}, line {line}: {message}")]
    Parse { what: String, line: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] polyspline_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    pub fn parse(what: impl Into<String>, line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse { what: what.into(), line, message: message.into() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
