use std::process::ExitCode;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or unconstructible configuration.
    #[error("schema error: {0}")]
    Schema(String),
    /// A numerical routine failed outright.
    #[error("numerical failure in check `{check}`: {message}")]
    Numeric { check: String, message: String },
    /// Writing the reports failed.
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numeric { .. } | CliError::Io(_) => 1,
        }
    }

    pub fn numeric(check: impl Into<String>, err: impl std::fmt::Display) -> Self {
        CliError::Numeric {
            check: check.into(),
            message: err.to_string(),
        }
    }

    pub fn into_exit(self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
