//! IO, file formats, and run orchestration around `greedylab-core`: JSON run
//! configs, basis-id resolution, CSV/JSON report emission, and the threaded
//! verify pipeline. All numeric output is full-precision and byte-identical
//! across runs and thread counts for a fixed config.

pub mod config;
pub mod report;
pub mod runner;

use std::fmt;

/// Process-level error taxonomy; the binary maps variants to exit codes
/// (1 = check failure, 2 = usage/config, 3 = capacity).
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Capacity(String),
    CheckFailure,
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::CheckFailure => 1,
            AppError::Usage(_) => 2,
            AppError::Capacity(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(msg) => write!(f, "{msg}"),
            AppError::Capacity(msg) => write!(f, "capacity: {msg}"),
            AppError::CheckFailure => write!(f, "one or more checks failed"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<greedylab_core::Error> for AppError {
    fn from(e: greedylab_core::Error) -> AppError {
        match e {
            greedylab_core::Error::Capacity { .. } => AppError::Capacity(e.to_string()),
            other => AppError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> AppError {
        AppError::Usage(format!("io error: {e}"))
    }
}
