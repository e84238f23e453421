//! Process-level error classification. Every failure a command can hit is
//! folded into one of four classes, each with a fixed exit code.

use std::fmt;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values, malformed problem JSON, parameters outside the
    /// domain of a rate formula.
    Usage(String),
    /// Filesystem reads/writes that failed.
    Io(String),
    /// The iteration hit `max_iter` before the stopping test fired.
    /// Partial outputs are written before this is raised.
    NonConvergence(String),
    /// One or more verification checks failed; the message names them.
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::NonConvergence(_) => EXIT_NON_CONVERGENCE,
            CliError::VerifyFailed(_) => EXIT_VERIFY_FAILED,
        }
    }

    /// Wraps a filesystem error with the path it concerned.
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::NonConvergence(msg) => write!(f, "{msg}"),
            CliError::VerifyFailed(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}
