use std::fmt;
use std::io;

use mixbound_core::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const RESOURCE: u8 = 3;
    pub const VERIFICATION: u8 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid input, including bad options.
    Input(String),
    /// A size guard tripped (too many states, node budget, generator size).
    Resource(String),
    /// Writing a report failed.
    Output(io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Output(_) => exit::INPUT,
            CliError::Resource(_) => exit::RESOURCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::TooManyStates { .. } | Error::BudgetExceeded { .. } | Error::TooLarge(_) => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
