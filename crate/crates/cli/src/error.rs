use thiserror::Error;

/// Failures that end a command; `exit_code` maps them onto the process exit
/// status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Run(#[from] levy_galerkin::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
