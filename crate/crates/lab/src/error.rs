use std::path::PathBuf;

use liedeg_core::LieError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric guard: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed series file {path}: {reason}")]
    Series { path: PathBuf, reason: String },
}

impl LabError {
    /// 2 config, 3 numeric guard, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Io { .. } | LabError::Series { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

impl From<LieError> for LabError {
    fn from(e: LieError) -> Self {
        match e {
            LieError::InvalidArgument(_) | LieError::TagMismatch { .. } | LieError::RepMismatch(_) | LieError::UnsupportedHomomorphism(_) => {
                LabError::Config(e.to_string())
            }
            _ => LabError::Numeric(e.to_string()),
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
