//! Unit-peak triangular mel filters on rounded FFT bins.
//!
//! `n_bands + 2` points equally spaced in mel between `fmin` and `fmax` are
//! mapped back to Hz and rounded to the nearest FFT bin. Band `k` rises
//! linearly from 0 at bin `b[k]` to 1 at `b[k+1]` and falls back to 0 at
//! `b[k+2]`.

use crate::error::{AudioError, Result};
use crate::matrix::Matrix;
use crate::mel::{hz_to_mel, mel_to_hz};

#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterBank {
    pub n_bands: usize,
    pub sample_rate: f64,
    pub frame_size: usize,
    /// `n_bands × (frame_size/2 + 1)`.
    pub weights: Matrix,
    /// The `n_bands + 2` mel-spaced frequencies before rounding.
    pub band_edges_hz: Vec<f64>,
    /// The rounded bin of each edge.
    pub bins: Vec<usize>,
}

impl MelFilterBank {
    /// Bins with non-zero weight in band `k` (open interval between its outer edges).
    pub fn support(&self, k: usize) -> std::ops::Range<usize> {
        self.bins[k] + 1..self.bins[k + 2]
    }

    pub fn center_bin(&self, k: usize) -> usize {
        self.bins[k + 1]
    }

    /// Rows rescaled to sum to one.
    pub fn row_normalized(&self) -> Matrix {
        let mut w = self.weights.clone();
        for r in 0..w.rows {
            let s: f64 = w.row(r).iter().sum();
            if s > 0.0 {
                for v in &mut w.data[r * w.cols..(r + 1) * w.cols] {
                    *v /= s;
                }
            }
        }
        w
    }
}

pub fn build_mel_filter_bank(
    n_bands: usize,
    sample_rate: f64,
    frame_size: usize,
    fmin: f64,
    fmax: f64,
) -> Result<MelFilterBank> {
    if n_bands == 0 {
        return Err(AudioError::Params("at least one mel band is required".into()));
    }
    if !(sample_rate > 0.0) || frame_size < 2 {
        return Err(AudioError::Params(format!(
            "sample rate {sample_rate} / frame size {frame_size} invalid"
        )));
    }
    if !(0.0 <= fmin && fmin < fmax && fmax <= sample_rate / 2.0) {
        return Err(AudioError::Params(format!(
            "need 0 <= fmin < fmax <= {}, got {fmin}..{fmax}",
            sample_rate / 2.0
        )));
    }
    let (lo, hi) = (hz_to_mel(fmin)?, hz_to_mel(fmax)?);
    let step = (hi - lo) / (n_bands + 1) as f64;
    let band_edges_hz = (0..n_bands + 2)
        .map(|i| mel_to_hz(lo + step * i as f64))
        .collect::<Result<Vec<_>>>()?;
    let n_bins = frame_size / 2 + 1;
    let bins: Vec<usize> = band_edges_hz
        .iter()
        .map(|hz| ((hz * frame_size as f64 / sample_rate).round() as usize).min(n_bins - 1))
        .collect();
    for (i, w) in bins.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(AudioError::BinCollision {
                band: i.min(n_bands - 1),
                bin: w[0],
            });
        }
    }
    let mut weights = Matrix::zeros(n_bands, n_bins);
    for k in 0..n_bands {
        let (l, c, r) = (bins[k], bins[k + 1], bins[k + 2]);
        for b in l + 1..=c {
            weights.set(k, b, (b - l) as f64 / (c - l) as f64);
        }
        for b in c + 1..r {
            weights.set(k, b, (r - b) as f64 / (r - c) as f64);
        }
    }
    Ok(MelFilterBank {
        n_bands,
        sample_rate,
        frame_size,
        weights,
        band_edges_hz,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_rows(fb: &MelFilterBank) {
        for k in 0..fb.n_bands {
            let row = fb.weights.row(k);
            assert!(row.iter().all(|&w| w >= 0.0));
            assert_eq!(row.iter().copied().fold(0.0, f64::max), 1.0);
            let nz: Vec<usize> = (0..row.len()).filter(|&b| row[b] > 0.0).collect();
            assert_eq!(nz.last().unwrap() - nz[0] + 1, nz.len(), "band {k} support not contiguous");
            assert_eq!(nz[0]..nz.last().unwrap() + 1, fb.support(k));
        }
    }

    #[test]
    fn default_shape() {
        let fb = build_mel_filter_bank(128, 16000.0, 2048, 0.0, 8000.0).unwrap();
        assert_eq!(fb.weights.shape(), (128, 1025));
        assert_eq!(fb.band_edges_hz.len(), 130);
        check_rows(&fb);
    }

    #[test]
    fn single_band_peaks_at_middle_mel_point() {
        let fb = build_mel_filter_bank(1, 16000.0, 512, 0.0, 8000.0).unwrap();
        let mid_hz = mel_to_hz(hz_to_mel(8000.0).unwrap() / 2.0).unwrap();
        let peak = (mid_hz * 512.0 / 16000.0).round() as usize;
        assert_eq!(fb.weights.get(0, peak), 1.0);
        assert_eq!(fb.bins, vec![0, peak, 256]);
    }

    #[test]
    fn centers_equally_spaced_in_mel_up_to_rounding() {
        let fb = build_mel_filter_bank(40, 16000.0, 2048, 0.0, 8000.0).unwrap();
        let bin_hz = 16000.0 / 2048.0;
        let step = hz_to_mel(8000.0).unwrap() / 41.0;
        for k in 0..fb.n_bands {
            let center_hz = fb.center_bin(k) as f64 * bin_hz;
            let exact = mel_to_hz(step * (k + 1) as f64).unwrap();
            let (a, b) = (hz_to_mel(center_hz).unwrap(), hz_to_mel(exact).unwrap());
            let slack = hz_to_mel(exact + bin_hz / 2.0).unwrap() - hz_to_mel((exact - bin_hz / 2.0).max(0.0)).unwrap();
            assert!((a - b).abs() <= slack / 2.0 + 1e-9);
        }
    }

    #[test]
    fn collision_is_reported() {
        let err = build_mel_filter_bank(128, 16000.0, 64, 0.0, 8000.0).unwrap_err();
        assert!(matches!(err, AudioError::BinCollision { .. }));
    }

    #[test]
    fn invalid_ranges() {
        assert!(build_mel_filter_bank(0, 16000.0, 512, 0.0, 8000.0).is_err());
        assert!(build_mel_filter_bank(4, 16000.0, 512, 0.0, 9000.0).is_err());
        assert!(build_mel_filter_bank(4, 16000.0, 512, 300.0, 300.0).is_err());
    }

    proptest! {
        #[test]
        fn valid_banks_have_proper_rows(bands in 1usize..40, exp in 9u32..12, fmin in 0.0f64..200.0) {
            let frame = 1usize << exp;
            if let Ok(fb) = build_mel_filter_bank(bands, 16000.0, frame, fmin, 8000.0) {
                prop_assert_eq!(fb.weights.shape(), (bands, frame / 2 + 1));
                check_rows(&fb);
            }
        }
    }
}
