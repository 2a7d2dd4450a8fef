use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid data: {0}")]
    Validation(String),
    #[error("header must be exactly {expected:?}, found {found:?}")]
    Header { expected: &'static str, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] modetrace_core::Error),
}

impl FormatError {
    pub(crate) fn at(line: u64, message: impl std::fmt::Display) -> Self {
        FormatError::Parse { line, message: message.to_string() }
    }
}
