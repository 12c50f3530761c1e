use std::path::{Path, PathBuf};

use isrs_model::ModelError;
use isrs_oracle::OracleError;
use isrs_pipeline::PipelineError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{}{key}: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { key: String, line: Option<usize>, reason: String },
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, reason: impl Into<String>) -> Self {
        CliError::Format { path: path.to_path_buf(), reason: reason.into() }
    }
}
