//! Per-video feature extraction: the 13-value vector from one bundle.
//!
//! Distances, kite heights and head poses are evaluated on every
//! `stride`-th bundle frame. Blinks use every frame, since the closed-eye
//! hysteresis needs consecutive samples. Texture and skin tone use every ROI
//! image the bundle references. Distances and kite heights are averaged over
//! frames, head pose contributes its per-axis standard deviation, texture and
//! skin tone are averaged over ROI images.

use deepfuse_core::features::col;
use deepfuse_core::image::read_ppm;
use deepfuse_core::{Label, LandmarkBundle, VideoFeatureVector, N_FEATURES};

use crate::color::{luminance_image, skin_tone_features};
use crate::error::{Result, VisionError};
use crate::geometry::{self, BlinkConfig};
use crate::landmarks::PNP_LANDMARKS;
use crate::pose::{self, CameraIntrinsics, HeadPose, PnpConfig, CANONICAL_HEAD_MODEL};
use crate::texture::{self, DEFAULT_LEVELS};

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractConfig {
    pub stride: usize,
    pub blink: BlinkConfig,
    pub pnp: PnpConfig,
    pub gray_levels: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            stride: 5,
            blink: BlinkConfig::default(),
            pnp: PnpConfig::default(),
            gray_levels: DEFAULT_LEVELS,
        }
    }
}

/// Something worth logging that did not abort extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtractionNote {
    KiteDegenerate { frame_index: u64, reason: String },
    PnpFailed { frame_index: u64, reason: String },
    /// Correlation undefined for the whole ROI; 1.0 substituted.
    CorrelationDegenerate { frame_index: u64 },
    DegenerateBlocks { frame_index: u64, blocks: usize },
}

impl std::fmt::Display for ExtractionNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtractionNote::KiteDegenerate { frame_index, reason } => {
                write!(f, "frame {frame_index}: cheekbone kite degenerate ({reason})")
            }
            ExtractionNote::PnpFailed { frame_index, reason } => {
                write!(f, "frame {frame_index}: head pose failed ({reason})")
            }
            ExtractionNote::CorrelationDegenerate { frame_index } => {
                write!(f, "frame {frame_index}: GLCM correlation degenerate, substituted 1")
            }
            ExtractionNote::DegenerateBlocks { frame_index, blocks } => {
                write!(f, "frame {frame_index}: {blocks} of 9 texture blocks degenerate")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub vector: VideoFeatureVector,
    pub notes: Vec<ExtractionNote>,
    pub poses: Vec<HeadPose>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn frame_pose(frame: &deepfuse_core::LandmarkFrame, cfg: &PnpConfig) -> Result<HeadPose> {
    let image: Vec<[f64; 2]> = PNP_LANDMARKS.iter().map(|&i| frame.pixel(i)).collect();
    let cam = CameraIntrinsics::for_image(f64::from(frame.image_width), f64::from(frame.image_height));
    pose::solve_pnp(&CANONICAL_HEAD_MODEL, &image, &cam, cfg)
}

pub fn extract_video_features(bundle: &LandmarkBundle, label: Option<Label>, cfg: &ExtractConfig) -> Result<Extraction> {
    if bundle.frames.len() < 2 {
        return Err(VisionError::NotEnoughFrames {
            needed: 2,
            have: bundle.frames.len(),
        });
    }
    let mut notes = Vec::new();
    let sampled: Vec<_> = bundle.frames.iter().step_by(cfg.stride.max(1)).collect();

    let noses: Vec<f64> = sampled.iter().map(|f| geometry::nose_size(f)).collect();
    let lips: Vec<f64> = sampled.iter().map(|f| geometry::lip_size(f)).collect();
    let pupils: Vec<f64> = sampled.iter().map(|f| geometry::inter_pupil_distance(f)).collect();

    let mut cheeks = Vec::new();
    let mut poses = Vec::new();
    for f in &sampled {
        match geometry::cheekbone_height(f) {
            Ok(k) => cheeks.push(k.height),
            Err(e) => notes.push(ExtractionNote::KiteDegenerate {
                frame_index: f.frame_index,
                reason: e.to_string(),
            }),
        }
        match frame_pose(f, &cfg.pnp) {
            Ok(p) => poses.push(p),
            Err(e) => notes.push(ExtractionNote::PnpFailed {
                frame_index: f.frame_index,
                reason: e.to_string(),
            }),
        }
    }
    let cheekbone = mean(&cheeks)
        .ok_or_else(|| VisionError::Degenerate("cheekbone kite degenerate on every sampled frame".into()))?;
    let spread = pose::headpose_spread(&poses)?;
    let blinks = geometry::count_blinks(&bundle.frames, &cfg.blink)?;

    if bundle.roi_refs.is_empty() {
        return Err(VisionError::NotEnoughFrames { needed: 1, have: 0 });
    }
    let mut contrasts = Vec::new();
    let mut correlations = Vec::new();
    let mut tones = Vec::new();
    for r in &bundle.roi_refs {
        let rgb = read_ppm(bundle.resolve(&r.path))?.to_rgb();
        tones.push(skin_tone_features(&rgb)?);
        match texture::blockwise_texture(&luminance_image(&rgb), cfg.gray_levels) {
            Ok(t) => {
                if t.degenerate_blocks > 0 {
                    notes.push(ExtractionNote::DegenerateBlocks {
                        frame_index: r.frame_index,
                        blocks: t.degenerate_blocks,
                    });
                }
                contrasts.push(t.contrast);
                correlations.push(t.correlation);
            }
            Err(VisionError::AllBlocksDegenerate { contrast }) => {
                notes.push(ExtractionNote::CorrelationDegenerate {
                    frame_index: r.frame_index,
                });
                contrasts.push(contrast);
                correlations.push(1.0);
            }
            Err(e) => return Err(e),
        }
    }

    let mut values = [0.0; N_FEATURES];
    values[col::CHEEKBONE_HEIGHT] = cheekbone;
    values[col::INTER_PUPIL_DISTANCE] = mean(&pupils).unwrap_or_default();
    values[col::BLINK_COUNT] = blinks as f64;
    values[col::HEADPOSE_X] = spread[0];
    values[col::HEADPOSE_Y] = spread[1];
    values[col::HEADPOSE_Z] = spread[2];
    values[col::NOSE_SIZE] = mean(&noses).unwrap_or_default();
    values[col::LIP_SIZE] = mean(&lips).unwrap_or_default();
    values[col::CONTRAST] = mean(&contrasts).unwrap_or_default();
    values[col::CORRELATION] = mean(&correlations).unwrap_or_default();
    for k in 0..3 {
        values[col::LUMINANCE + k] = tones.iter().map(|t| t[k]).sum::<f64>() / tones.len() as f64;
    }
    let vector = VideoFeatureVector {
        video_id: bundle.video_id.clone(),
        values,
        label,
    };
    vector.validate()?;
    Ok(Extraction { vector, notes, poses })
}
