use thiserror::Error;

/// Errors shared by every construction in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input is structurally malformed (dangling ids, duplicates, wrong shapes).
    #[error("schema violation: {0}")]
    Schema(String),
    /// Input is well-formed but breaks a law it is required to satisfy.
    #[error("validation failed: {0}")]
    Invalid(String),
    /// Two values that must line up (sources, targets, dimensions) do not.
    #[error("mismatch: {0}")]
    Mismatch(String),
    /// An enumeration would exceed a configured size bound.
    #[error("guardrail exceeded: {0}")]
    Guardrail(String),
    /// A question needs simplices above the truncation level.
    #[error("beyond truncation: {0}")]
    Truncation(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
