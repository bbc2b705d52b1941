//! Library half of the `blockplan` command-line tool: model file ingestion
//! and export, dot rendering, and the subcommand implementations.

pub mod commands;
pub mod dot;
pub mod modelfile;

use std::fmt;

/// Command failure carrying its process exit code: 1 for domain
/// diagnostics, 2 for parse and I/O errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Domain(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}
