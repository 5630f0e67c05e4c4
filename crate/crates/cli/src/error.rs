use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use numrad_core::Error;

/// Outcome of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Failed,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Pass => ExitCode::SUCCESS,
            Status::Failed => ExitCode::from(1),
            Status::Inconclusive => ExitCode::from(3),
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Failed
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an unreadable input file.
    Input(String),
    /// A mathematical precondition or check failed.
    Check(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Check(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSquare { .. } | Error::NonFinite { .. } | Error::Shape(_) | Error::InvalidArgument(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Check(e.to_string()),
        }
    }
}
