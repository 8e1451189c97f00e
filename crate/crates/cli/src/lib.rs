//! Command-line frontend for `mprk-core`: matrix file ingestion, CSV
//! output, and parallel execution of the fixed-point scans.

pub mod cli;
pub mod commands;
pub mod csv;
pub mod matrix_file;
pub mod parallel;

use thiserror::Error;

/// Failure of a subcommand, carrying the process exit code contract:
/// 1 for runtime or numeric failures, 2 for usage or validation failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    pub(crate) fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub(crate) fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}
