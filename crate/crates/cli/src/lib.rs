//! IO, sampling and scan machinery behind the `belldist` binary.
//!
//! The text formats are line-oriented: a scenario header, then one entry
//! per line, `#` starting a comment. Missing entries are zero. See
//! [`format`] for the exact grammar shared by behaviors, functionals and
//! input distributions.

pub mod format;
pub mod sampling;
pub mod scan;

use std::fmt;

/// Command-level failures with the exit codes of the CLI contract:
/// 2 parse/input, 3 solver, 4 infeasible point.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Solver(String),
    InfeasiblePoint(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::InfeasiblePoint(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::InfeasiblePoint(m) => write!(f, "infeasible: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<belldist_core::Error> for CliError {
    fn from(e: belldist_core::Error) -> Self {
        match e {
            belldist_core::Error::Solver(s) => CliError::Solver(s.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
