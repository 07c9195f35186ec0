use std::fmt;

use spectral_core::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CERTIFICATION: u8 = 4;

/// Error carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SOLVER,
            message: message.into(),
        }
    }

    pub fn certification(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CERTIFICATION,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Argument errors map to usage, numerical failures to solver.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPolygon(_) | Error::InvalidArgument(_) | Error::Json(_) => CliError::usage(e.to_string()),
            Error::NoVerifiedConstant { .. } | Error::PartitionTooLarge { .. } => CliError::certification(e.to_string()),
            _ => CliError::solver(e.to_string()),
        }
    }
}
