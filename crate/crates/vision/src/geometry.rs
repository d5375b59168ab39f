//! Distance features, eye aspect ratio, blink counting and the cheekbone kite.

use deepfuse_core::LandmarkFrame;

use crate::error::{Result, VisionError};
use crate::landmarks::{self, EyeLandmarks};

pub type Point2 = [f64; 2];

pub fn euclid(p: Point2, q: Point2) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

pub fn midpoint(p: Point2, q: Point2) -> Point2 {
    [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
}

/// Distance between the nose base and tip landmarks, in pixels.
pub fn nose_size(frame: &LandmarkFrame) -> f64 {
    euclid(frame.pixel(landmarks::NOSE_BASE), frame.pixel(landmarks::NOSE_TIP))
}

/// Distance between the mouth corners, in pixels.
pub fn lip_size(frame: &LandmarkFrame) -> f64 {
    euclid(frame.pixel(landmarks::MOUTH_LEFT), frame.pixel(landmarks::MOUTH_RIGHT))
}

pub fn inter_pupil_distance(frame: &LandmarkFrame) -> f64 {
    let center = |(top, bottom): (usize, usize)| midpoint(frame.pixel(top), frame.pixel(bottom));
    euclid(center(landmarks::LEFT_PUPIL), center(landmarks::RIGHT_PUPIL))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eye {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeState {
    pub ear: f64,
    pub is_closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlinkConfig {
    pub threshold: f64,
    /// Minimum consecutive closed frames that make one blink.
    pub min_closed_frames: usize,
    pub left: EyeLandmarks,
    pub right: EyeLandmarks,
}

impl Default for BlinkConfig {
    fn default() -> Self {
        BlinkConfig {
            threshold: 0.2,
            min_closed_frames: 2,
            left: EyeLandmarks::left_default(),
            right: EyeLandmarks::right_default(),
        }
    }
}

const MIN_EYE_SPAN_PX: f64 = 1e-9;

pub fn eye_aspect_ratio(frame: &LandmarkFrame, eye: Eye, cfg: &BlinkConfig) -> Result<EyeState> {
    let table = match eye {
        Eye::Left => &cfg.left,
        Eye::Right => &cfg.right,
    };
    let points: Vec<(Point2, Point2)> = table
        .lid_pairs
        .iter()
        .map(|&(u, l)| (frame.pixel(u), frame.pixel(l)))
        .collect();
    ear_from_points(
        &points,
        frame.pixel(table.corners.0),
        frame.pixel(table.corners.1),
        cfg.threshold,
    )
}

/// Mean vertical lid gap over the horizontal corner span.
pub fn ear_from_points(lid_pairs: &[(Point2, Point2)], corner_a: Point2, corner_b: Point2, threshold: f64) -> Result<EyeState> {
    let span = euclid(corner_a, corner_b);
    if span < MIN_EYE_SPAN_PX || lid_pairs.is_empty() {
        return Err(VisionError::Degenerate(format!("eye corner span {span} px is degenerate")));
    }
    let vertical = lid_pairs.iter().map(|&(u, l)| euclid(u, l)).sum::<f64>() / lid_pairs.len() as f64;
    let ear = vertical / span;
    Ok(EyeState {
        ear,
        is_closed: ear < threshold,
    })
}

/// Number of closed runs at least `min_closed_frames` long in an EAR trace.
pub fn count_blinks_in_trace(ears: &[f64], threshold: f64, min_closed_frames: usize) -> usize {
    let mut blinks = 0;
    let mut run = 0;
    for &e in ears {
        if e < threshold {
            run += 1;
            if run == min_closed_frames.max(1) {
                blinks += 1;
            }
        } else {
            run = 0;
        }
    }
    blinks
}

/// Per-frame EAR averaged over both eyes.
pub fn ear_trace(frames: &[LandmarkFrame], cfg: &BlinkConfig) -> Result<Vec<f64>> {
    frames
        .iter()
        .map(|f| {
            let l = eye_aspect_ratio(f, Eye::Left, cfg)?;
            let r = eye_aspect_ratio(f, Eye::Right, cfg)?;
            Ok((l.ear + r.ear) / 2.0)
        })
        .collect()
}

pub fn count_blinks(frames: &[LandmarkFrame], cfg: &BlinkConfig) -> Result<usize> {
    Ok(count_blinks_in_trace(&ear_trace(frames, cfg)?, cfg.threshold, cfg.min_closed_frames))
}

/// Quadrilateral kite measurements; distances in pixels, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KiteMeasure {
    pub lr: f64,
    pub mtr: f64,
    pub mtc: f64,
    pub rc: f64,
    pub angle_r: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub h: f64,
    /// Cheekbone height, `mtc - h`.
    pub height: f64,
}

const COS_TOLERANCE: f64 = 1e-9;
const MIN_SIN_Y: f64 = 1e-9;

fn checked_acos_deg(c: f64, what: &str) -> Result<f64> {
    if !c.is_finite() || c.abs() > 1.0 + COS_TOLERANCE {
        return Err(VisionError::Degenerate(format!("cos {what} = {c} outside [-1, 1]")));
    }
    Ok(c.clamp(-1.0, 1.0).acos().to_degrees())
}

/// Kite with vertices at the two cheekbones, the nose mid-top and the chin.
///
/// ```text
/// cos R = (LR² + MTR² − MTC²) / (2·LR·MTR)
/// cos x = (MTR² + MTC² − RC²) / (2·MTR·MTC)
/// y     = 180° − (x + R)
/// h     = sin R · MTR / sin y
/// H     = MTC − h
/// ```
pub fn kite_from_points(left: Point2, right: Point2, mid_top: Point2, chin: Point2) -> Result<KiteMeasure> {
    let lr = euclid(left, right);
    let mtr = euclid(mid_top, right);
    let mtc = euclid(mid_top, chin);
    let rc = euclid(right, chin);
    if [lr, mtr, mtc, rc].iter().any(|&d| d <= 0.0) {
        return Err(VisionError::Degenerate("coincident kite vertices".into()));
    }
    let angle_r = checked_acos_deg((lr * lr + mtr * mtr - mtc * mtc) / (2.0 * lr * mtr), "R")?;
    let angle_x = checked_acos_deg((mtr * mtr + mtc * mtc - rc * rc) / (2.0 * mtr * mtc), "x")?;
    let angle_y = 180.0 - (angle_x + angle_r);
    let sin_y = angle_y.to_radians().sin();
    if sin_y.abs() < MIN_SIN_Y {
        return Err(VisionError::Degenerate(format!("sin y = {sin_y} too small")));
    }
    let h = angle_r.to_radians().sin() * mtr / sin_y;
    Ok(KiteMeasure {
        lr,
        mtr,
        mtc,
        rc,
        angle_r,
        angle_x,
        angle_y,
        h,
        height: mtc - h,
    })
}

pub fn cheekbone_height(frame: &LandmarkFrame) -> Result<KiteMeasure> {
    kite_from_points(
        frame.pixel(landmarks::KITE_LEFT_CHEEKBONE),
        frame.pixel(landmarks::KITE_RIGHT_CHEEKBONE),
        frame.pixel(landmarks::KITE_MID_TOP),
        frame.pixel(landmarks::KITE_CHIN),
    )
}
