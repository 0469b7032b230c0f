//! Subcommand implementations.

pub mod expand_templates;
pub mod gen_sequences;
pub mod mix;
pub mod score;
pub mod stats;
pub mod substitute;

mod common;

use std::path::PathBuf;

/// Process exit codes: 0 success, 2 input-data errors, 3 config errors.
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// What a finished subcommand reports back to `main`.
#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub warnings: u64,
    pub report_path: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: EXIT_CONFIG,
            error: error.into(),
        }
    }

    pub fn data(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: EXIT_DATA,
            error: error.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        CliError::data(error)
    }
}
