use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{AudioError, Result};
use crate::matrix::Matrix;
use crate::window::Window;

/// Magnitude spectrogram, `frame_size/2 + 1` bins by `n_frames`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stft {
    pub frame_size: usize,
    pub hop: usize,
    pub window: Window,
    pub magnitudes: Matrix,
}

impl Stft {
    pub fn n_bins(&self) -> usize {
        self.magnitudes.rows
    }

    pub fn n_frames(&self) -> usize {
        self.magnitudes.cols
    }

    pub fn power(&self) -> Matrix {
        self.magnitudes.map(|m| m * m)
    }
}

pub fn n_frames(len: usize, frame_size: usize, hop: usize) -> usize {
    1 + (len - frame_size) / hop
}

pub fn validate_frame(frame_size: usize, hop: usize) -> Result<()> {
    if frame_size < 2 || !frame_size.is_power_of_two() {
        return Err(AudioError::Params(format!("frame size {frame_size} is not a power of two ≥ 2")));
    }
    if hop == 0 || hop > frame_size {
        return Err(AudioError::Params(format!("hop {hop} must be in 1..={frame_size}")));
    }
    Ok(())
}

pub fn stft(samples: &[f64], frame_size: usize, hop: usize, window: Window) -> Result<Stft> {
    validate_frame(frame_size, hop)?;
    if samples.len() < frame_size {
        return Err(AudioError::TooShort {
            len: samples.len(),
            frame_size,
        });
    }
    let frames = n_frames(samples.len(), frame_size, hop);
    let bins = frame_size / 2 + 1;
    let coeffs = window.coefficients(frame_size);
    let plan = FftPlanner::new().plan_fft_forward(frame_size);
    let mut buf = vec![Complex64::default(); frame_size];
    let mut magnitudes = Matrix::zeros(bins, frames);
    for f in 0..frames {
        let start = f * hop;
        for ((b, &x), &w) in buf.iter_mut().zip(&samples[start..start + frame_size]).zip(&coeffs) {
            *b = Complex64::new(x * w, 0.0);
        }
        plan.process(&mut buf);
        for (k, c) in buf[..bins].iter().enumerate() {
            magnitudes.set(k, f, c.norm());
        }
    }
    Ok(Stft {
        frame_size,
        hop,
        window,
        magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, sr: f64, secs: f64) -> Vec<f64> {
        (0..(sr * secs) as usize)
            .map(|i| (std::f64::consts::TAU * freq * i as f64 / sr).sin())
            .collect()
    }

    #[test]
    fn sine_peaks_at_expected_bin() {
        let s = stft(&sine(440.0, 16000.0, 1.0), 2048, 512, Window::Hann).unwrap();
        assert_eq!(s.n_bins(), 1025);
        assert_eq!(s.n_frames(), 1 + (16000 - 2048) / 512);
        for f in 0..s.n_frames() {
            let col: Vec<f64> = (0..s.n_bins()).map(|k| s.magnitudes.get(k, f)).collect();
            let argmax = (0..col.len()).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
            assert_eq!(argmax, 56);
        }
    }

    #[test]
    fn zeros_in_zeros_out() {
        let s = stft(&vec![0.0; 5000], 1024, 256, Window::Hann).unwrap();
        assert!(s.magnitudes.data.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(stft(&[0.0; 10], 16, 4, Window::Hann), Err(AudioError::TooShort { .. })));
        assert!(stft(&[0.0; 100], 24, 4, Window::Hann).is_err());
        assert!(stft(&[0.0; 100], 16, 17, Window::Hann).is_err());
        assert!(stft(&[0.0; 100], 16, 0, Window::Hann).is_err());
    }
}
