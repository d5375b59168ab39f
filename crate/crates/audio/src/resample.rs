/// Linear-interpolation resampling. Output sample `i` is taken at input
/// position `i·from/to`; the output covers the input's duration.
pub fn resample_linear(samples: &[f64], from_hz: u32, to_hz: u32) -> Vec<f64> {
    if from_hz == to_hz || samples.len() < 2 {
        return samples.to_vec();
    }
    let ratio = f64::from(from_hz) / f64::from(to_hz);
    let n_out = ((samples.len() - 1) as f64 / ratio).floor() as usize + 1;
    (0..n_out)
        .map(|i| {
            let pos = i as f64 * ratio;
            let j = pos.floor() as usize;
            if j + 1 >= samples.len() {
                return samples[samples.len() - 1];
            }
            let t = pos - j as f64;
            samples[j] * (1.0 - t) + samples[j + 1] * t
        })
        .collect()
}
