//! CLI error type and exit-code mapping.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 precondition or input error,
//! 3 numerical failure.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Invalid(String),
    Core(cbkern_core::Error),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse { .. } | CliError::Invalid(_) => 2,
            CliError::Core(e) => match e {
                cbkern_core::Error::Sdp { .. } | cbkern_core::Error::NoConvergence(_) => 3,
                cbkern_core::Error::Inconsistent(_) => 1,
                _ => 2,
            },
            CliError::Verification(_) => 1,
        }
    }

    pub fn parse(path: &str, err: &serde_json::Error) -> Self {
        CliError::Parse {
            path: path.to_string(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "io error: {}", e),
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "parse error in {} at {}:{}: {}", path, line, column, message),
            CliError::Invalid(m) => write!(f, "invalid input: {}", m),
            CliError::Core(e) => write!(f, "{}", e),
            CliError::Verification(m) => write!(f, "verification failed: {}", m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<cbkern_core::Error> for CliError {
    fn from(e: cbkern_core::Error) -> Self {
        CliError::Core(e)
    }
}
