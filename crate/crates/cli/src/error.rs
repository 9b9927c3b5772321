use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A bad value tied to one flag.
    #[error("{flag}: {message}")]
    Flag { flag: String, message: String },

    /// Writing a file named by a flag failed.
    #[error("{flag}: {message}")]
    Output { flag: String, message: String },

    /// A check suite reported failures.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn flag(flag: &str, message: impl Into<String>) -> Self {
        CliError::Flag {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn output(flag: &str, message: impl Into<String>) -> Self {
        CliError::Output {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Flag { .. } => 2,
            CliError::Output { .. } | CliError::CheckFailed(_) => 1,
        }
    }
}

/// Attaches a flag name to library errors.
pub trait FlagContext<T> {
    fn flag(self, flag: &str) -> Result<T, CliError>;
}

impl<T, E: std::fmt::Display> FlagContext<T> for Result<T, E> {
    fn flag(self, flag: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::flag(flag, e.to_string()))
    }
}
