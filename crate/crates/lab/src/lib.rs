//! Command-line front end, file formats and parallel simulation driver for
//! `mtee-core`.

pub mod commands;
pub mod config;
pub mod format;
pub mod parallel;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mtee_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error("{0} decoder disagreement(s) with the capability oracle")]
    Discrepancy(usize),
}

impl LabError {
    /// 0 success, 1 usage/config/IO error, 2 validation discrepancy.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Discrepancy(_) => 2,
            _ => 1,
        }
    }
}
