use deepfuse_audio::AudioError;
use deepfuse_core::CoreError;
use deepfuse_fusion::FusionError;
use deepfuse_learn::LearnError;
use deepfuse_vision::VisionError;

/// Failure classes with stable process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or configuration (exit 1).
    #[error("{0}")]
    Usage(String),
    /// Unreadable, missing or inconsistent data (exit 2).
    #[error("{0}")]
    Data(String),
    /// Numerical failure such as a diverged training run (exit 3).
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<VisionError> for CliError {
    fn from(e: VisionError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<AudioError> for CliError {
    fn from(e: AudioError) -> Self {
        match e {
            AudioError::Params(_) | AudioError::BinCollision { .. } => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Diverged { .. } => CliError::Numeric(e.to_string()),
            LearnError::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}
