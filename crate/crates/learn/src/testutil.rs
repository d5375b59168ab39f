use deepfuse_core::{Dataset, Label, Sample, SeededRng};

/// Overlapping Gaussian classes; deepfake rows are shifted by +1 per feature.
pub fn dataset(n_real: usize, n_fake: usize, d: usize) -> Dataset {
    let mut rng = SeededRng::new((n_real * 1000 + n_fake * 10 + d) as u64);
    let mut rows = Vec::new();
    for (label, n, prefix) in [(Label::Real, n_real, "r"), (Label::Deepfake, n_fake, "f")] {
        for i in 0..n {
            rows.push(Sample {
                id: format!("{prefix}{i}"),
                features: (0..d).map(|_| rng.normal() + label.as_f64()).collect(),
                label: Some(label),
            });
        }
    }
    Dataset::new(rows).unwrap()
}

pub fn blobs(n: usize, d: usize, gap: f64, seed: u64) -> Dataset {
    crate::synthetic::separable_blobs(n, d, gap, &mut SeededRng::new(seed))
}
