//! Seeded synthetic training problems with known solutions.

use deepfuse_audio::Matrix;
use deepfuse_core::{Dataset, Label, Sample, SeededRng};

/// `n` rows in `d` dimensions, half per class, linearly separable: along a
/// random unit direction every row lies at least `gap/2` on its class side,
/// the orthogonal components are standard normal.
pub fn separable_blobs(n: usize, d: usize, gap: f64, rng: &mut SeededRng) -> Dataset {
    let mut w: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w.iter_mut().for_each(|v| *v /= norm);
    let rows = (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Real } else { Label::Deepfake };
            let mut x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let along: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            let side = if label == Label::Deepfake { 1.0 } else { -1.0 };
            let target = side * (gap / 2.0 + rng.normal().abs());
            for (xi, wi) in x.iter_mut().zip(&w) {
                *xi += (target - along) * wi;
            }
            Sample {
                id: format!("blob{i:05}"),
                features: x,
                label: Some(label),
            }
        })
        .collect();
    Dataset::new(rows).expect("generated ids are unique")
}

/// dB spectrograms (`rows × cols`, values in `[-80, 0]`) whose class is set
/// by where the energy sits: real clips are loud in the lowest quarter of
/// the bands, deepfake clips in the third quarter. Everything else is noise
/// between −80 and −60 dB, so the difference of the two band sums separates
/// the classes perfectly.
pub fn band_energy_spectrograms(n: usize, rows: usize, cols: usize, rng: &mut SeededRng) -> (Vec<Matrix>, Vec<Label>) {
    let q = rows / 4;
    let mut out = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { Label::Real } else { Label::Deepfake };
        let band = if label == Label::Real { 0..q } else { 2 * q..3 * q };
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = if band.contains(&r) {
                    rng.uniform_range(-30.0, 0.0)
                } else {
                    rng.uniform_range(-80.0, -60.0)
                };
                m.set(r, c, v);
            }
        }
        out.push(m);
        labels.push(label);
    }
    (out, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_are_balanced_and_deterministic() {
        let a = separable_blobs(100, 13, 2.0, &mut SeededRng::new(1));
        let b = separable_blobs(100, 13, 2.0, &mut SeededRng::new(1));
        assert_eq!(a, b);
        assert_eq!(a.class_counts(), [50, 50]);
    }

    #[test]
    fn band_sum_separates() {
        let (ms, ls) = band_energy_spectrograms(20, 16, 8, &mut SeededRng::new(2));
        for (m, l) in ms.iter().zip(&ls) {
            let low: f64 = (0..4).flat_map(|r| m.row(r).to_vec()).sum();
            let high: f64 = (8..12).flat_map(|r| m.row(r).to_vec()).sum();
            assert_eq!(*l == Label::Real, low > high);
        }
    }
}
