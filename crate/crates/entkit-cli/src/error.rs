use std::path::PathBuf;

use thiserror::Error;

/// Everything that ends a run with exit code 2: bad files, bad flags, or a
/// violated mathematical precondition. Verification failures are not errors;
/// they are reported in the output document and exit with code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("error: {path}: {message}", path = path.display())]
    Io { path: PathBuf, message: String },
    #[error("error: {path}: parse error at line {line} column {column}: {message}", path = path.display())]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("error: {path}: field '{field}': {message}", path = path.display())]
    File { path: PathBuf, field: &'static str, message: String },
    #[error("error: {0}")]
    Flag(String),
    #[error("error: precondition violated: {0}")]
    Precondition(String),
    #[error("error: ENTKIT_TOLERANCE_SCALE: {0}")]
    Env(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Wraps a library error as the named precondition it reports.
pub fn precondition(err: impl std::fmt::Display) -> CliError {
    CliError::Precondition(err.to_string())
}
