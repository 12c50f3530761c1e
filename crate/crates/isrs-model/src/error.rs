use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter { name: &'static str, value: f64, reason: &'static str },
    #[error("phonon frequency {omega} is not an integer multiple of the grid spacing {spacing} (ratio {ratio})")]
    OffGrid { omega: f64, spacing: f64, ratio: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unsupported input: {0}")]
    Unsupported(&'static str),
}

impl ModelError {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        ModelError::Parameter { name, value, reason }
    }
}
