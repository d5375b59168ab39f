//! oRGB skin-tone features.

use deepfuse_core::{GrayImage, RgbImage};

use crate::error::{Result, VisionError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrgbPixel {
    pub l: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Linear RGB → (L, C1, C2) transform.
pub const ORGB_MATRIX: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [0.500, 0.500, -1.000],
    [0.866, -0.866, 0.000],
];

pub fn rgb_to_orgb(rgb: [f64; 3]) -> OrgbPixel {
    let row = |r: [f64; 3]| r[0] * rgb[0] + r[1] * rgb[1] + r[2] * rgb[2];
    OrgbPixel {
        l: row(ORGB_MATRIX[0]),
        c1: row(ORGB_MATRIX[1]),
        c2: row(ORGB_MATRIX[2]),
    }
}

fn to_f64(p: [u8; 3]) -> [f64; 3] {
    [f64::from(p[0]), f64::from(p[1]), f64::from(p[2])]
}

/// Mean (luminance, chrominance1, chrominance2) over every ROI pixel.
pub fn skin_tone_features(roi: &RgbImage) -> Result<[f64; 3]> {
    if roi.pixels.is_empty() {
        return Err(VisionError::TooSmall("empty ROI".into()));
    }
    let mut acc = [0.0; 3];
    for &p in &roi.pixels {
        let o = rgb_to_orgb(to_f64(p));
        acc[0] += o.l;
        acc[1] += o.c1;
        acc[2] += o.c2;
    }
    let n = roi.pixels.len() as f64;
    Ok(acc.map(|v| v / n))
}

/// Grayscale through the luminance row, rounded to the nearest level.
pub fn luminance_image(roi: &RgbImage) -> GrayImage {
    GrayImage {
        width: roi.width,
        height: roi.height,
        pixels: roi
            .pixels
            .iter()
            .map(|&p| rgb_to_orgb(to_f64(p)).l.round().clamp(0.0, 255.0) as u8)
            .collect(),
    }
}
