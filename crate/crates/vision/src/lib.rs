//! Interpretable facial features for video deepfake detection.
//!
//! From a landmark bundle this crate computes the 13-value per-video vector:
//! cheekbone height, inter-pupil distance, blink count, head-pose spread on
//! three axes, nose and lip size, GLCM contrast and correlation, and oRGB
//! luminance/chrominance.

pub mod color;
pub mod error;
pub mod extract;
pub mod geometry;
pub mod landmarks;
pub mod pose;
pub mod synthetic;
pub mod texture;

#[cfg(test)]
mod testutil;

pub use error::{Result, VisionError};
pub use extract::{extract_video_features, ExtractConfig, Extraction, ExtractionNote};
