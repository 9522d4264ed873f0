use std::path::PathBuf;

use lotus_core::{DualError, FormatError, GenError, ModelError, ReductionError};
use thiserror::Error;

pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_SOLVER_FAILURE: i32 = 3;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solver(#[from] DualError),
}

impl BenchError {
    /// 2 for anything wrong with the input, 3 when a valid input fails to solve
    /// or its results cannot be written.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_)
            | BenchError::Read { .. }
            | BenchError::Parse { .. }
            | BenchError::Format(_)
            | BenchError::Gen(_)
            | BenchError::Model(_)
            | BenchError::Solver(DualError::InvalidConfig(_) | DualError::Model(_))
            | BenchError::Reduction(
                ReductionError::InvalidInput(_)
                | ReductionError::EmptyScenarioSet
                | ReductionError::InvalidTargetSize { .. }
                | ReductionError::Model(_),
            ) => EXIT_INVALID_CONFIG,
            BenchError::Write { .. } | BenchError::Reduction(_) | BenchError::Solver(_) => EXIT_SOLVER_FAILURE,
        }
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Read { path: path.to_path_buf(), source })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &[u8]) -> Result<(), BenchError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| BenchError::Write { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| BenchError::Write { path: path.to_path_buf(), source })
}
