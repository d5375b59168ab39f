use std::path::PathBuf;

use deepfuse_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum FusionError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("no {what} items to pair")]
    EmptyPool { what: &'static str },
    #[error("sample {sample}: no {modality} prediction for '{id}'")]
    Missing {
        sample: String,
        modality: &'static str,
        id: String,
    },
    #[error("pair manifest line {line}: {reason}")]
    Manifest { line: u64, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, FusionError>;

pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> FusionError {
    FusionError::Io {
        path: path.to_path_buf(),
        source,
    }
}
