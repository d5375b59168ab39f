use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed landmark bundle JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("landmark bundle schema violation in frame {frame_index}: {reason}")]
    Frame { frame_index: i64, reason: String },

    #[error("landmark bundle schema violation: {0}")]
    Bundle(String),

    #[error("PNM decode error: {0}")]
    Pnm(String),

    #[error("WAV decode error: {0}")]
    Wav(String),

    #[error("feature CSV error at line {line}: {reason}")]
    Csv { line: u64, reason: String },

    #[error("dataset invariant violated: {0}")]
    Dataset(String),
}

impl CoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }
}
