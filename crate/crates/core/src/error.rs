use thiserror::Error;

/// Errors raised while configuring or running a game.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    /// A configuration field is missing, malformed or refers to something unknown.
    #[error("invalid {field}: {message}")]
    Config { field: String, message: String },

    /// The algorithm cannot run on this collection (e.g. no tell-tale oracle).
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_inapplicable(&self) -> bool {
        matches!(self, LabError::Inapplicable(_))
    }
}

impl From<std::io::Error> for LabError {
    fn from(err: std::io::Error) -> Self {
        LabError::Io(err.to_string())
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
