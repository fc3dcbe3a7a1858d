//! Experiment configuration, orchestration and output formats behind the
//! `pncmap` binary.

pub mod commands;
pub mod output;
pub mod spec;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag, config file or field value.
    #[error("{0}")]
    Config(String),
    /// An internal consistency check failed.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn field(name: &str, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{name}: {err}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<pncmap::Error> for CliError {
    fn from(err: pncmap::Error) -> Self {
        match err {
            pncmap::Error::OrbitInconsistency { .. } => CliError::Verification(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
