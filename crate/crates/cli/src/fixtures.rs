//! Synthetic labelled fixture sets: landmark bundles with ROI images and
//! WAV clips whose classes differ in ways the extracted features can see.
//!
//! Real videos have little head motion, regular blinks and smooth skin
//! texture; deepfake videos move more, rarely blink and carry noisier,
//! shifted skin tones. Real clips are harmonic tones with a falling
//! spectrum; deepfake clips add a strong high-frequency buzz.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use deepfuse_core::{write_landmark_bundle, write_ppm, write_wav, AudioClip, Label, SeededRng};
use deepfuse_vision::synthetic::SyntheticVideo;

use crate::data::write_labels;
use crate::error::{io_error, Result};

pub struct FixtureSet {
    pub bundles_dir: PathBuf,
    pub audio_dir: PathBuf,
    pub labels_path: PathBuf,
    pub labels: BTreeMap<String, Label>,
    pub files: Vec<PathBuf>,
}

fn label_for(i: usize) -> Label {
    if i % 2 == 0 {
        Label::Real
    } else {
        Label::Deepfake
    }
}

pub fn synthetic_video(id: &str, label: Label, rng: &mut SeededRng) -> SyntheticVideo {
    let mut v = SyntheticVideo::new(id);
    v.n_frames = 30 + rng.below(16);
    let jitter = |rng: &mut SeededRng, s: f64| rng.uniform_range(-s, s);
    match label {
        Label::Real => {
            v.motion_deg = 3.0 + jitter(rng, 1.0);
            let start = 3 + rng.below(5);
            v.closed_frames = vec![start, start + 1, start + 14, start + 15, start + 16];
            v.tint = [195.0 + jitter(rng, 8.0), 150.0 + jitter(rng, 8.0), 125.0 + jitter(rng, 8.0)];
            v.noise = 10.0 + jitter(rng, 3.0);
        }
        Label::Deepfake => {
            v.motion_deg = 12.0 + jitter(rng, 3.0);
            v.closed_frames = vec![];
            v.tint = [175.0 + jitter(rng, 8.0), 150.0 + jitter(rng, 8.0), 150.0 + jitter(rng, 8.0)];
            v.noise = 45.0 + jitter(rng, 8.0);
        }
    }
    v
}

pub fn synthetic_clip(label: Label, rng: &mut SeededRng) -> AudioClip {
    let sr = 16_000u32;
    let n = (f64::from(sr) * rng.uniform_range(0.9, 1.3)) as usize;
    let f0 = rng.uniform_range(110.0, 220.0);
    let buzz = rng.uniform_range(3000.0, 5000.0);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / f64::from(sr);
            let env = (std::f64::consts::PI * i as f64 / n as f64).sin();
            let vib = 1.0 + 0.01 * (TAU * 5.0 * t).sin();
            let voice: f64 = (1..=8).map(|k| (TAU * f0 * k as f64 * vib * t).sin() / k as f64).sum();
            let noise = 0.01 * (rng.uniform() - 0.5);
            let extra = match label {
                Label::Real => 0.0,
                Label::Deepfake => 0.8 * (TAU * buzz * t).sin() + 0.5 * (TAU * (buzz * 1.37) * t).sin(),
            };
            0.25 * env * (voice + extra) + noise
        })
        .collect();
    AudioClip::new(sr, samples)
}

/// Writes `bundles/`, `audio/` and `labels.csv` under `out`. Video ids are
/// `vid_000…`, clip ids `clip_000…`; labels alternate real, deepfake.
pub fn generate(out: &Path, n_videos: usize, n_clips: usize, seed: u64) -> Result<FixtureSet> {
    let bundles_dir = out.join("bundles");
    let audio_dir = out.join("audio");
    for d in [&bundles_dir, &audio_dir] {
        std::fs::create_dir_all(d).map_err(|e| io_error(d, e))?;
    }
    let root = SeededRng::new(seed);
    let mut labels = BTreeMap::new();
    let mut files = Vec::new();
    for i in 0..n_videos {
        let mut rng = root.derive(i as u64);
        let id = format!("vid_{i:03}");
        let label = label_for(i);
        let (bundle, rois) = synthetic_video(&id, label, &mut rng).render(&mut rng);
        for (name, img) in &rois {
            let p = bundles_dir.join(name);
            write_ppm(img, &p)?;
            files.push(p);
        }
        let p = bundles_dir.join(format!("{id}.json"));
        write_landmark_bundle(&bundle, &p)?;
        files.push(p);
        labels.insert(id, label);
    }
    for i in 0..n_clips {
        let mut rng = root.derive(1_000_000 + i as u64);
        let id = format!("clip_{i:03}");
        let label = label_for(i);
        let p = audio_dir.join(format!("{id}.wav"));
        write_wav(&synthetic_clip(label, &mut rng), &p)?;
        files.push(p);
        labels.insert(id, label);
    }
    let labels_path = out.join("labels.csv");
    write_labels(&labels, &labels_path)?;
    files.push(labels_path.clone());
    Ok(FixtureSet {
        bundles_dir,
        audio_dir,
        labels_path,
        labels,
        files,
    })
}
