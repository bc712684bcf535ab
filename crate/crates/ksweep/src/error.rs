use std::process::ExitCode;

/// Failure classes of the command-line tool, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A check or property did not hold (exit 1).
    #[error("{0}")]
    Assertion(String),
    /// Unreadable, malformed or invalid input (exit 2).
    #[error("{0}")]
    Input(String),
    /// A numerical routine failed its own verification (exit 3).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_status(&self) -> u8 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.exit_status())
    }

    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn numerical(e: impl std::fmt::Display) -> Self {
        CliError::Numerical(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
