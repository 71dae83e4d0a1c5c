use thiserror::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] toric_core::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(_) => 2,
            CliError::Verify(_) => 3,
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Core(toric_core::Error::Domain(msg.into()))
    }
}
