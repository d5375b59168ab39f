use std::path::PathBuf;

use deepfuse_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AudioError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("clip of {len} samples is shorter than one {frame_size}-sample frame")]
    TooShort { len: usize, frame_size: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("mel band {band}: filter points collide at FFT bin {bin}; use fewer bands or a larger frame")]
    BinCollision { band: usize, bin: usize },
    #[error("matrix file: {0}")]
    Matrix(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, AudioError>;

pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> AudioError {
    AudioError::Io {
        path: path.to_path_buf(),
        source,
    }
}
