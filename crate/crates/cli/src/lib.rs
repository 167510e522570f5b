//! Operational shell around `ripe-core`: CSV ingestion, the versioned model
//! file, the synthetic-data experiment harness, and the command
//! implementations behind the `ripe` binary.

pub mod commands;
pub mod experiment;
pub mod model_file;
pub mod table;

use thiserror::Error;

/// Errors surfaced by the CLI, split by exit code: input/usage problems
/// exit with 2, internal invariant violations with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ripe_core::Error> for CliError {
    fn from(err: ripe_core::Error) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Input(format!("io error: {err}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Input(format!("csv error: {err}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Input(format!("model file parse error: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
