//! Command line and HTTP front end for the `scottrank` analyzer.

pub mod commands;
pub mod report;
pub mod server;

use scottrank::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Invalid(_) | CliError::Io { .. } => 1,
            CliError::TooLarge(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Space(_) => CliError::Parse(e.to_string()),
            Error::SpaceTooLarge { .. } => CliError::TooLarge(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<scottrank::SpaceError> for CliError {
    fn from(e: scottrank::SpaceError) -> CliError {
        CliError::Parse(e.to_string())
    }
}
