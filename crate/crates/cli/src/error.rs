use std::path::PathBuf;

use otoc_core::{EnsembleError, ModelError, OtocError, PulseError};
use thiserror::Error;

/// Process exit status for a validation failure.
pub const EXIT_VALIDATION: i32 = 1;
/// Process exit status when the numbers themselves admit no solution.
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Otoc(#[from] OtocError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pulse(PulseError::Infeasible { .. }) => EXIT_INFEASIBLE,
            _ => EXIT_VALIDATION,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
