use std::process::ExitCode;

use opjump_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("iteration failed: {0}")]
    Iteration(CoreError),
    #[error("oracle failed: {0}")]
    Oracle(CoreError),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Core(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Iteration(_) => 2,
            CliError::Oracle(_) => 3,
            CliError::Verify(_) => 4,
            CliError::Core(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    /// Breakdown errors from the recurrence path; argument errors stay usage errors.
    pub fn iteration(e: CoreError) -> Self {
        match e {
            CoreError::DivisionBreakdown { .. }
            | CoreError::NonPositiveBeta { .. }
            | CoreError::PrecisionExhausted { .. } => CliError::Iteration(e),
            other => usage_or_core(other),
        }
    }

    pub fn oracle(e: CoreError) -> Self {
        match e {
            CoreError::PositivityBreakdown { .. } | CoreError::PrecisionExhausted { .. } => CliError::Oracle(e),
            other => usage_or_core(other),
        }
    }
}

fn usage_or_core(e: CoreError) -> CliError {
    match e {
        CoreError::InvalidWeight(_)
        | CoreError::InvalidPrecision(_)
        | CoreError::InvalidArgument(_)
        | CoreError::Domain(_) => CliError::Usage(e.to_string()),
        other => CliError::Core(other),
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        usage_or_core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
