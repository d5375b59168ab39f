//! Landmark bundle: the per-video ingestion document.
//!
//! JSON layout (one object per file):
//!
//! ```text
//! { "video_id": str, "fps": real, "frame_count": int,
//!   "frames": [ { "frame_index": int, "image_width": int, "image_height": int,
//!                 "roi_box": [x0, y0, x1, y1],
//!                 "points": [[x, y, z] x 468] } ],
//!   "roi_refs": [ { "frame_index": int, "path": str } ],
//!   "audio_ref": str | null }
//! ```
//!
//! `x`/`y` are fractions of the image width/height, `z` is relative depth.
//! `roi_box` is a half-open pixel rectangle. Relative paths in `roi_refs` and
//! `audio_ref` resolve against the directory containing the bundle file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::image::read_pnm_dimensions;

pub const N_LANDMARKS: usize = 468;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkFrame {
    pub frame_index: u64,
    pub image_width: u32,
    pub image_height: u32,
    pub roi_box: [u32; 4],
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiRef {
    pub frame_index: u64,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkBundle {
    pub video_id: String,
    pub fps: f64,
    pub frame_count: u64,
    pub frames: Vec<LandmarkFrame>,
    #[serde(default)]
    pub roi_refs: Vec<RoiRef>,
    #[serde(default)]
    pub audio_ref: Option<String>,
    /// Directory the bundle was read from; not serialized.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl LandmarkFrame {
    /// Landmark `idx` in pixel units.
    #[inline]
    pub fn pixel(&self, idx: usize) -> [f64; 2] {
        let p = self.points[idx];
        [p[0] * f64::from(self.image_width), p[1] * f64::from(self.image_height)]
    }

    pub fn roi_size(&self) -> (usize, usize) {
        let [x0, y0, x1, y1] = self.roi_box;
        ((x1 - x0) as usize, (y1 - y0) as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| CoreError::Frame {
            frame_index: self.frame_index as i64,
            reason,
        };
        if self.image_width == 0 || self.image_height == 0 {
            return Err(fail("image dimensions must be positive".into()));
        }
        if self.points.len() != N_LANDMARKS {
            return Err(fail(format!(
                "expected {N_LANDMARKS} points, found {}",
                self.points.len()
            )));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.iter().all(|v| v.is_finite()) {
                return Err(fail(format!("point {i} has a non-finite coordinate")));
            }
            if !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]) {
                return Err(fail(format!(
                    "point {i} = ({}, {}) outside the normalized [0,1] range",
                    p[0], p[1]
                )));
            }
        }
        let [x0, y0, x1, y1] = self.roi_box;
        if x0 >= x1 || y0 >= y1 {
            return Err(fail(format!("roi_box {:?} is empty or inverted", self.roi_box)));
        }
        if x1 > self.image_width || y1 > self.image_height {
            return Err(fail(format!(
                "roi_box {:?} exceeds image bounds {}x{}",
                self.roi_box, self.image_width, self.image_height
            )));
        }
        Ok(())
    }
}

impl LandmarkBundle {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let bundle: LandmarkBundle = serde_json::from_str(s)?;
        bundle.validate()?;
        Ok(bundle)
    }

    /// Compact JSON with a trailing newline; stable for a given bundle.
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        if self.video_id.is_empty() {
            return Err(CoreError::Bundle("video_id is empty".into()));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(CoreError::Bundle(format!("fps must be positive, got {}", self.fps)));
        }
        let mut prev: Option<u64> = None;
        for f in &self.frames {
            if prev.is_some_and(|p| f.frame_index <= p) {
                return Err(CoreError::Frame {
                    frame_index: f.frame_index as i64,
                    reason: "frame indices must be strictly increasing".into(),
                });
            }
            if f.frame_index >= self.frame_count {
                return Err(CoreError::Frame {
                    frame_index: f.frame_index as i64,
                    reason: format!("frame index beyond frame_count {}", self.frame_count),
                });
            }
            f.validate()?;
            prev = Some(f.frame_index);
        }
        for r in &self.roi_refs {
            if self.frame(r.frame_index).is_none() {
                return Err(CoreError::Frame {
                    frame_index: r.frame_index as i64,
                    reason: format!("roi_ref {:?} names a frame not in the bundle", r.path),
                });
            }
        }
        Ok(())
    }

    /// Every ROI reference must be a readable PPM/PGM whose dimensions equal
    /// its frame's `roi_box`.
    pub fn validate_files(&self) -> Result<()> {
        for r in &self.roi_refs {
            let frame = self.frame(r.frame_index).ok_or_else(|| CoreError::Frame {
                frame_index: r.frame_index as i64,
                reason: "roi_ref names a frame not in the bundle".into(),
            })?;
            let path = self.resolve(&r.path);
            let dims = read_pnm_dimensions(&path).map_err(|e| CoreError::Frame {
                frame_index: r.frame_index as i64,
                reason: format!("unreadable ROI image {}: {e}", path.display()),
            })?;
            if dims != frame.roi_size() {
                return Err(CoreError::Frame {
                    frame_index: r.frame_index as i64,
                    reason: format!(
                        "ROI image {}x{} does not match roi_box {:?}",
                        dims.0, dims.1, frame.roi_box
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn frame(&self, frame_index: u64) -> Option<&LandmarkFrame> {
        self.frames
            .binary_search_by_key(&frame_index, |f| f.frame_index)
            .ok()
            .map(|i| &self.frames[i])
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn audio_path(&self) -> Option<PathBuf> {
        self.audio_ref.as_deref().map(|a| self.resolve(a))
    }
}

/// Parses and fully validates a bundle, including its ROI image references.
pub fn read_landmark_bundle(path: impl AsRef<Path>) -> Result<LandmarkBundle> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut bundle = LandmarkBundle::from_json_str(&text)?;
    bundle.base_dir = Some(path.parent().map(Path::to_path_buf).unwrap_or_default());
    bundle.validate_files()?;
    Ok(bundle)
}

pub fn write_landmark_bundle(bundle: &LandmarkBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bundle.to_json_string()?).map_err(|e| CoreError::io(path, e))
}
