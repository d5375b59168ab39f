//! Deterministic synthetic faces for fixtures and tests.
//!
//! A 468-point head model is posed with a known rotation/translation and
//! projected through the default camera, so every geometric feature has a
//! known generating value. Only the indices the feature extractors read are
//! placed anatomically; the rest are spread over the face oval.

use deepfuse_core::bundle::N_LANDMARKS;
use deepfuse_core::{LandmarkBundle, LandmarkFrame, RgbImage, RoiRef, SeededRng};

use crate::landmarks::{self, EyeLandmarks};
use crate::pose::{compose_euler, CameraIntrinsics, Vec3, CANONICAL_HEAD_MODEL};

/// Horizontal eye span in model units.
pub const EYE_SPAN: f64 = 120.0;
const EYE_Y: f64 = -170.0;
const EYE_CENTER_X: f64 = 150.0;

fn place_eye(points: &mut [[f64; 3]], eye: &EyeLandmarks, pupil: (usize, usize), center_x: f64, openness: f64) {
    let dir = center_x.signum();
    let half_gap = openness * EYE_SPAN / 2.0;
    // outer corner first: image-left eye opens toward -x
    points[eye.corners.0] = [center_x + dir * EYE_SPAN / 2.0, EYE_Y, 133.0];
    points[eye.corners.1] = [center_x - dir * EYE_SPAN / 2.0, EYE_Y, 128.0];
    for (k, &(up, low)) in eye.lid_pairs.iter().enumerate() {
        let x = center_x + dir * (40.0 - 20.0 * k as f64);
        points[up] = [x, EYE_Y - half_gap, 130.0];
        points[low] = [x, EYE_Y + half_gap, 130.0];
    }
    points[pupil.0] = [center_x, EYE_Y - half_gap, 130.0];
    points[pupil.1] = [center_x, EYE_Y + half_gap, 130.0];
}

/// Head model with both eyes at aspect ratio `openness`.
pub fn face_model(openness: f64) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut points: Vec<[f64; 3]> = (0..N_LANDMARKS)
        .map(|i| {
            let r = ((i as f64 + 0.5) / N_LANDMARKS as f64).sqrt() * 0.9;
            let a = i as f64 * golden;
            [230.0 * r * a.cos(), 300.0 * r * a.sin(), 120.0 + 40.0 * r]
        })
        .collect();
    for (idx, p) in landmarks::PNP_LANDMARKS.iter().zip(CANONICAL_HEAD_MODEL) {
        points[*idx] = p;
    }
    points[landmarks::NOSE_TIP] = [0.0, -140.0, 80.0];
    points[landmarks::KITE_LEFT_CHEEKBONE] = [-260.0, -60.0, 150.0];
    points[landmarks::KITE_RIGHT_CHEEKBONE] = [260.0, -60.0, 150.0];
    place_eye(&mut points, &EyeLandmarks::right_default(), landmarks::LEFT_PUPIL, -EYE_CENTER_X, openness);
    place_eye(&mut points, &EyeLandmarks::left_default(), landmarks::RIGHT_PUPIL, EYE_CENTER_X, openness);
    points
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePose {
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
    pub translation: [f64; 3],
}

/// Projects the model into a `width × height` image. The ROI box is the
/// landmark bounding box grown by 5% and clamped to the image.
pub fn render_frame(model: &[[f64; 3]], pose: &FramePose, frame_index: u64, width: u32, height: u32) -> LandmarkFrame {
    let cam = CameraIntrinsics::for_image(f64::from(width), f64::from(height));
    let r = compose_euler(pose.pitch, pose.yaw, pose.roll);
    let t = Vec3::from(pose.translation);
    let (w, h) = (f64::from(width), f64::from(height));
    let points: Vec<[f64; 3]> = model
        .iter()
        .map(|p| {
            let pc = r * Vec3::new(p[0], p[1], p[2]) + t;
            let uv = cam.project(&pc);
            [(uv[0] / w).clamp(0.0, 1.0), (uv[1] / h).clamp(0.0, 1.0), (pc.z - t.z) / t.z]
        })
        .collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &points {
        x0 = x0.min(p[0] * w);
        x1 = x1.max(p[0] * w);
        y0 = y0.min(p[1] * h);
        y1 = y1.max(p[1] * h);
    }
    let (mx, my) = ((x1 - x0) * 0.05, (y1 - y0) * 0.05);
    let bx0 = (x0 - mx).floor().clamp(0.0, w - 1.0) as u32;
    let by0 = (y0 - my).floor().clamp(0.0, h - 1.0) as u32;
    let bx1 = ((x1 + mx).ceil().clamp(0.0, w) as u32).max(bx0 + 1);
    let by1 = ((y1 + my).ceil().clamp(0.0, h) as u32).max(by0 + 1);
    LandmarkFrame {
        frame_index,
        image_width: width,
        image_height: height,
        roi_box: [bx0, by0, bx1, by1],
        points,
    }
}

/// Skin-like texture: base tint plus uniform noise of the given amplitude.
pub fn skin_roi(width: usize, height: usize, tint: [f64; 3], noise: f64, rng: &mut SeededRng) -> RgbImage {
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            // slow shading so neighbouring pixels stay correlated
            let shade = 12.0 * ((x as f64 / 9.0).sin() + (y as f64 / 11.0).cos());
            let n = noise * (rng.uniform() - 0.5);
            pixels.push(tint.map(|c| (c + shade + n).round().clamp(0.0, 255.0) as u8));
        }
    }
    RgbImage::new(width, height, pixels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticVideo {
    pub video_id: String,
    pub n_frames: usize,
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    /// Peak head rotation amplitude in degrees (sinusoidal yaw/pitch/roll).
    pub motion_deg: f64,
    /// Frame positions with the eyes closed.
    pub closed_frames: Vec<usize>,
    pub open_ear: f64,
    pub closed_ear: f64,
    /// An ROI image is emitted for every `roi_stride`-th frame.
    pub roi_stride: usize,
    pub tint: [f64; 3],
    pub noise: f64,
    pub audio_ref: Option<String>,
}

impl SyntheticVideo {
    pub fn new(video_id: impl Into<String>) -> Self {
        SyntheticVideo {
            video_id: video_id.into(),
            n_frames: 30,
            fps: 30.0,
            width: 320,
            height: 240,
            motion_deg: 8.0,
            closed_frames: vec![],
            open_ear: 0.3,
            closed_ear: 0.05,
            roi_stride: 5,
            tint: [190.0, 140.0, 120.0],
            noise: 20.0,
            audio_ref: None,
        }
    }

    pub fn pose_at(&self, i: usize) -> FramePose {
        let phase = i as f64 / self.n_frames.max(1) as f64 * std::f64::consts::TAU;
        FramePose {
            pitch: 0.5 * self.motion_deg * (phase * 1.5).sin(),
            yaw: self.motion_deg * phase.sin(),
            roll: 0.3 * self.motion_deg * (phase * 2.0).cos(),
            translation: [0.0, 0.0, 1500.0],
        }
    }

    /// The bundle (with relative ROI paths `<video_id>_roi_<frame>.ppm`) and
    /// the ROI images to be written next to it.
    pub fn render(&self, rng: &mut SeededRng) -> (LandmarkBundle, Vec<(String, RgbImage)>) {
        let open = face_model(self.open_ear);
        let closed = face_model(self.closed_ear);
        let mut frames = Vec::with_capacity(self.n_frames);
        let mut rois = Vec::new();
        let mut roi_refs = Vec::new();
        for i in 0..self.n_frames {
            let model = if self.closed_frames.contains(&i) { &closed } else { &open };
            let frame = render_frame(model, &self.pose_at(i), i as u64, self.width, self.height);
            if i % self.roi_stride.max(1) == 0 {
                let (w, h) = frame.roi_size();
                let path = format!("{}_roi_{i:04}.ppm", self.video_id);
                rois.push((path.clone(), skin_roi(w, h, self.tint, self.noise, rng)));
                roi_refs.push(RoiRef {
                    frame_index: i as u64,
                    path,
                });
            }
            frames.push(frame);
        }
        let bundle = LandmarkBundle {
            video_id: self.video_id.clone(),
            fps: self.fps,
            frame_count: self.n_frames as u64,
            frames,
            roi_refs,
            audio_ref: self.audio_ref.clone(),
            base_dir: None,
        };
        (bundle, rois)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_frames_validate() {
        let mut rng = SeededRng::new(1);
        let (b, rois) = SyntheticVideo::new("s").render(&mut rng);
        b.validate().unwrap();
        assert_eq!(rois.len(), 6);
        for (path, img) in &rois {
            let idx: u64 = path.trim_end_matches(".ppm").rsplit('_').next().unwrap().parse().unwrap();
            assert_eq!((img.width, img.height), b.frame(idx).unwrap().roi_size());
        }
    }
}
