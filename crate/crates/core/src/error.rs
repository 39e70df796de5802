//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by generators, metric queries, gluing and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (unknown ids, empty sets, bad maps).
    #[error("input error: {0}")]
    Input(String),
    /// Mesh too coarse to resolve the requested construction.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Declared accumulation structure contains a cycle.
    #[error("cyclic accumulation declaration: {0}")]
    CyclicDeclaration(String),
    /// A verification check failed; carries a witness description.
    #[error("check failed: {0}")]
    Check(String),
    /// Manifest, report or CLI usage problem.
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for building an [`Error::Input`].
pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
