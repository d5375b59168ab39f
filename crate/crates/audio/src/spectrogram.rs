use std::str::FromStr;

use deepfuse_core::AudioClip;

use crate::db::{amplitude_to_db, power_to_db, DEFAULT_FLOOR_DB};
use crate::error::{AudioError, Result};
use crate::filterbank::{build_mel_filter_bank, MelFilterBank};
use crate::matrix::Matrix;
use crate::resample::resample_linear;
use crate::stft::{stft, Stft};
use crate::window::Window;

/// Where the dB conversion happens relative to the mel projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DbOrder {
    /// Project the power spectrogram, then convert to dB.
    #[default]
    MelThenDb,
    /// Convert magnitudes to dB, then take each band's weighted mean
    /// (filter rows normalized to sum to one).
    DbThenMel,
}

impl FromStr for DbOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mel-then-db" => Ok(DbOrder::MelThenDb),
            "db-then-mel" => Ok(DbOrder::DbThenMel),
            other => Err(format!("unknown dB order '{other}' (mel-then-db | db-then-mel)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MelParams {
    pub sample_rate: u32,
    pub frame_size: usize,
    pub hop: usize,
    pub n_bands: usize,
    pub fmin: f64,
    /// `None` means Nyquist.
    pub fmax: Option<f64>,
    pub floor_db: f64,
    pub window: Window,
    pub order: DbOrder,
}

impl Default for MelParams {
    fn default() -> Self {
        MelParams {
            sample_rate: 16_000,
            frame_size: 2048,
            hop: 512,
            n_bands: 128,
            fmin: 0.0,
            fmax: None,
            floor_db: DEFAULT_FLOOR_DB,
            window: Window::Hann,
            order: DbOrder::MelThenDb,
        }
    }
}

impl MelParams {
    pub fn fmax_hz(&self) -> f64 {
        self.fmax.unwrap_or(f64::from(self.sample_rate) / 2.0)
    }

    pub fn filter_bank(&self) -> Result<MelFilterBank> {
        build_mel_filter_bank(
            self.n_bands,
            f64::from(self.sample_rate),
            self.frame_size,
            self.fmin,
            self.fmax_hz(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.floor_db < 0.0) {
            return Err(AudioError::Params(format!("dB floor {} must be negative", self.floor_db)));
        }
        crate::stft::validate_frame(self.frame_size, self.hop)?;
        self.filter_bank().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    /// `n_bands × n_frames`, dB relative to the maximum, floored.
    pub db: Matrix,
    pub params: MelParams,
}

/// Mono samples at `params.sample_rate`.
pub fn prepare_samples(clip: &AudioClip, params: &MelParams) -> Vec<f64> {
    resample_linear(&clip.samples, clip.sample_rate, params.sample_rate)
}

/// Filter bank times power spectrogram, before any dB conversion.
pub fn mel_power(samples: &[f64], params: &MelParams) -> Result<Matrix> {
    let fb = params.filter_bank()?;
    let s = stft(samples, params.frame_size, params.hop, params.window)?;
    fb.weights.matmul(&s.power())
}

fn project(fb: &MelFilterBank, s: &Stft, params: &MelParams) -> Result<Matrix> {
    match params.order {
        DbOrder::MelThenDb => Ok(power_to_db(&fb.weights.matmul(&s.power())?, params.floor_db)),
        DbOrder::DbThenMel => {
            // averaged as offsets above the floor so silent regions stay exactly at it
            let floor = params.floor_db;
            let above = amplitude_to_db(&s.magnitudes, floor).map(|v| v - floor);
            Ok(fb.row_normalized().matmul(&above)?.map(|v| (v + floor).clamp(floor, 0.0)))
        }
    }
}

pub fn mel_spectrogram_samples(samples: &[f64], params: &MelParams) -> Result<MelSpectrogram> {
    params.validate()?;
    let fb = params.filter_bank()?;
    let s = stft(samples, params.frame_size, params.hop, params.window)?;
    Ok(MelSpectrogram {
        db: project(&fb, &s, params)?,
        params: params.clone(),
    })
}

/// Resamples `clip` to the target rate, then computes the dB mel spectrogram.
pub fn mel_spectrogram(clip: &AudioClip, params: &MelParams) -> Result<MelSpectrogram> {
    mel_spectrogram_samples(&prepare_samples(clip, params), params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, secs: f64, amp: f64) -> Vec<f64> {
        (0..(16000.0 * secs) as usize)
            .map(|i| amp * (std::f64::consts::TAU * freq * i as f64 / 16000.0).sin())
            .collect()
    }

    #[test]
    fn three_second_shape() {
        let p = MelParams::default();
        let m = mel_spectrogram_samples(&vec![0.0; 48000], &p).unwrap();
        assert_eq!(m.db.shape(), (128, 1 + (48000 - 2048) / 512));
        assert_eq!(m.db.cols, 90);
    }

    #[test]
    fn silence_is_uniform_floor() {
        for order in [DbOrder::MelThenDb, DbOrder::DbThenMel] {
            let p = MelParams { order, ..MelParams::default() };
            let m = mel_spectrogram_samples(&vec![0.0; 20000], &p).unwrap();
            assert!(m.db.data.iter().all(|&v| v == -80.0));
        }
    }

    #[test]
    fn sine_lands_in_band_containing_its_bin() {
        let p = MelParams::default();
        let fb = p.filter_bank().unwrap();
        let m = mel_spectrogram_samples(&sine(440.0, 1.0, 0.5), &p).unwrap();
        for f in 0..m.db.cols {
            let band = (0..m.db.rows).max_by(|&a, &b| m.db.get(a, f).total_cmp(&m.db.get(b, f))).unwrap();
            assert!(fb.support(band).contains(&56), "frame {f}: band {band}");
        }
    }

    #[test]
    fn sign_flip_invariant_and_gain_shift() {
        let p = MelParams::default();
        let x = sine(1000.0, 0.5, 0.3);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let double: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert_eq!(
            mel_spectrogram_samples(&x, &p).unwrap().db,
            mel_spectrogram_samples(&neg, &p).unwrap().db
        );
        let a = mel_power(&x, &p).unwrap();
        let b = mel_power(&double, &p).unwrap();
        for (pa, pb) in a.data.iter().zip(&b.data) {
            if *pa > 1e-20 {
                let shift = 10.0 * pb.log10() - 10.0 * pa.log10();
                assert!((shift - 6.020599913279624).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn db_first_order_respects_floor() {
        let p = MelParams {
            order: DbOrder::DbThenMel,
            ..MelParams::default()
        };
        let m = mel_spectrogram_samples(&sine(440.0, 0.5, 0.5), &p).unwrap();
        assert!(m.db.data.iter().all(|&v| (-80.0..=0.0).contains(&v)));
    }

    #[test]
    fn resampled_clip_matches_native_rate_shape() {
        let clip = AudioClip {
            sample_rate: 8000,
            samples: vec![0.1; 16000],
        };
        let m = mel_spectrogram(&clip, &MelParams::default()).unwrap();
        assert_eq!(m.db.cols, 1 + (31999 - 2048) / 512);
    }
}
