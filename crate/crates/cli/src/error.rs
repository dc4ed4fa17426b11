use thiserror::Error;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error: {message}")]
    Parse { path: String, message: String },

    #[error("validation error: {0}")]
    Validation(#[from] entropic_core::Error),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{0}")]
    Serialize(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(entropic_core::Error::Capacity { .. }) => EXIT_CAPACITY,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
