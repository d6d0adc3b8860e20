use thiserror::Error;

pub type Result<T> = std::result::Result<T, GptError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GptError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("not a state: first entry is {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown theory `{0}`")]
    UnknownTheory(String),

    #[error("no exact representation: {0}")]
    NoExactForm(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("serialization: {0}")]
    Serde(String),
}

impl GptError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        GptError::InvalidParameter(msg.into())
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(GptError::Dimension { expected, got })
        }
    }
}

impl From<serde_json::Error> for GptError {
    fn from(e: serde_json::Error) -> Self {
        GptError::Serde(e.to_string())
    }
}
