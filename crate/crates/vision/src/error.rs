use thiserror::Error;

pub type Result<T> = std::result::Result<T, VisionError>;

#[derive(Debug, Error)]
pub enum VisionError {
    #[error(transparent)]
    Core(#[from] deepfuse_core::CoreError),

    /// Geometry that makes a feature undefined (coincident points, cosines
    /// outside [-1, 1], zero variance).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("pose solver failed: {0}")]
    Pnp(String),

    #[error("not enough usable frames: need {needed}, have {have}")]
    NotEnoughFrames { needed: usize, have: usize },

    /// GLCM correlation is undefined because a marginal has zero variance.
    #[error("GLCM marginal variance is zero (constant texture)")]
    ZeroVariance,

    #[error("image too small: {0}")]
    TooSmall(String),

    /// Every ROI block had undefined correlation; the contrast is still valid.
    #[error("all texture blocks are degenerate (contrast {contrast})")]
    AllBlocksDegenerate { contrast: f64 },
}
