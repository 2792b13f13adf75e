use std::path::PathBuf;

/// Failures of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments; exit code 1.
    Config(String),
    /// Failure while running; exit code 2.
    Runtime { message: String, last_snapshot: Option<PathBuf> },
}

impl CliError {
    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime {
            message: e.to_string(),
            last_snapshot: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime { .. } => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error[config]: {m}"),
            CliError::Runtime { message, .. } => write!(f, "error[runtime]: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(e)
    }
}

impl From<bqp_core::Error> for CliError {
    fn from(e: bqp_core::Error) -> Self {
        CliError::runtime(e)
    }
}
