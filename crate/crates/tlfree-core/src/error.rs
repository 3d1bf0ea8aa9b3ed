//! Error type shared by every layer of the engine.

use thiserror::Error;

/// Failure modes of the combinatorial engine.
///
/// The variants are grouped by how a caller should react: argument and
/// truncation errors are domain errors, resource limits mean a configured
/// cap was hit, and solver-rank errors mean a linear system was not uniquely
/// solvable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or mismatched input (wrong ground set, crossing pairs, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A configured cap (enumeration size, depth, degree) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// A trace or expectation needed data beyond the available depth.
    #[error("truncation: {0}")]
    Truncation(String),
    /// A quantum-integer or pivot denominator vanished at a specialization.
    #[error("singular specialization: {0}")]
    Singularity(String),
    /// A linear system was rank deficient or inconsistent.
    #[error("solver rank defect: {0}")]
    SolverRank(String),
    /// Invalid run configuration (zero block dimension, bad seed, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Unparseable serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used throughout the workspace.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
