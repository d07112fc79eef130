use feather_core::FeatherError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("no input graphs: {0}")]
    EmptyInput(String),
    #[error("incompatible checkpoint: {0}")]
    IncompatibleCheckpoint(String),
    #[error("{failed} of {total} graphs failed")]
    PartialFailure { failed: usize, total: usize },
    #[error(transparent)]
    Core(#[from] FeatherError),
}

impl CliError {
    /// 0 success, 1 usage or configuration, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::EmptyInput(_)
            | CliError::IncompatibleCheckpoint(_)
            | CliError::PartialFailure { .. } => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &FeatherError) -> i32 {
    match e {
        FeatherError::InvalidParameter(_)
        | FeatherError::InvalidDomain { .. }
        | FeatherError::TooDense { .. }
        | FeatherError::OracleSizeExceeded { .. } => 1,
        FeatherError::DivergenceDetected { .. } | FeatherError::NonFinite(_) => 3,
        _ => 2,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
