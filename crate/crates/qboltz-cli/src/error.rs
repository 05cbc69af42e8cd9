//! Process-level error classification: every failure maps to one exit code.

use thiserror::Error;

/// Exit code for a config that fails validation or cannot be parsed.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for a run whose artifacts violate a numerical contract.
pub const EXIT_CONTRACT: u8 = 3;
/// Exit code for environment failures (I/O, permissions).
pub const EXIT_OTHER: u8 = 1;

/// Failures of a run, ordered by how they map to exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// The config is malformed or fails an invariant; nothing was written.
    #[error("invalid config: {0}")]
    Config(String),
    /// The run completed and artifacts were written, but a numerical
    /// contract was violated; the report lists the findings.
    #[error("numerical contract violated: {0}")]
    Contract(String),
    /// Filesystem or serialization trouble outside the numerics.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// CSV-layer trouble while writing an artifact.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// JSON-layer trouble while writing an artifact.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// The process exit code this failure maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Contract(_) => EXIT_CONTRACT,
            _ => EXIT_OTHER,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
