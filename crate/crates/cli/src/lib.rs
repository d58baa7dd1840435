//! Command-line driver: configuration loading, run store and experiment commands.

use macrosim::backends::BackendError;
use macrosim::engine::{ConfigIssue, SimError};
use thiserror::Error;

pub mod charts;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod report;
pub mod store;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed configuration input.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Runtime(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json error: {e}"))
    }
}

impl CliError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 1,
            CliError::Sim(SimError::Config(_))
            | CliError::Sim(SimError::Backend(BackendError::MissingApiKey(_) | BackendError::Config(_))) => 1,
            _ => 2,
        }
    }
}
