pub use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward DFT `X[k] = Σ x[n]·e^{-2πikn/N}` (no scaling).
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    if buf.len() > 1 {
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    }
    buf
}

/// Magnitudes of the non-negative frequency bins `0..=n/2` of a real signal.
pub fn real_magnitudes(input: &[f64]) -> Vec<f64> {
    let spectrum = fft(&input.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    spectrum[..input.len() / 2 + 1].iter().map(|c| c.norm()).collect()
}
