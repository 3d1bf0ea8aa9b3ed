//! Driver errors and their exit codes.

use thiserror::Error;
use tlfree_core::Error as EngineError;

/// Success.
pub const EXIT_OK: i32 = 0;
/// Malformed input or a failed domain precondition.
pub const EXIT_DOMAIN: i32 = 1;
/// A configured cap was exceeded.
pub const EXIT_RESOURCE: i32 = 2;
/// A linear system was rank deficient or inconsistent.
pub const EXIT_SOLVER_RANK: i32 = 3;
/// Unknown subcommand or flag.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} checks failed")]
    Verify { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(EngineError::ResourceLimit(_)) => EXIT_RESOURCE,
            CliError::Engine(EngineError::SolverRank(_)) => EXIT_SOLVER_RANK,
            CliError::Engine(_) | CliError::Io { .. } | CliError::Verify { .. } => EXIT_DOMAIN,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
