use isrs_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
}

impl PipelineError {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        PipelineError::Invalid { what, reason: reason.into() }
    }
}
