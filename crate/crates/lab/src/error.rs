use std::io;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{0}")]
    Core(#[from] chenlee_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad snapshot: {0}")]
    Snapshot(String),
}

impl LabError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Invalid { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// `3` for numerical failures of a run, `2` for everything the user can
    /// fix in the config or on the command line.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Parse(_) => "parse",
            LabError::Invalid { .. } => "invalid-config",
            LabError::Core(e) if e.is_numerical() => "numerical",
            LabError::Core(_) => "invalid-input",
            LabError::Io { .. } => "io",
            LabError::Csv(_) => "csv",
            LabError::Json(_) => "json",
            LabError::Snapshot(_) => "snapshot",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let field = match self {
            LabError::Invalid { field, .. } => Some(field.clone()),
            LabError::Core(chenlee_core::Error::InvalidParameter { name, .. }) => Some((*name).to_string()),
            _ => None,
        };
        ErrorRecord { kind: self.kind(), field, message: self.to_string(), exit_code: self.exit_code() }
    }
}

/// Machine-readable failure written to `error.json`.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub field: Option<String>,
    pub message: String,
    pub exit_code: i32,
}
