//! Exit-code taxonomy shared by every subcommand.

use micromaser::MaserError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A flag, config entry or input file violates a precondition.
    #[error("{0}")]
    Validation(String),

    /// The computation itself failed: truncation overflow or a stepper
    /// that ran out of budget.
    #[error("{0}")]
    Numeric(String),

    /// Reading or writing an artifact failed.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    /// Stable contract: 2 validation, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<MaserError> for CliError {
    fn from(e: MaserError) -> Self {
        match e {
            MaserError::Domain { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
