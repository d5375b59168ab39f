use deepfuse_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};

/// Per-feature z-score statistics; zero spread is stored as 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn identity(n: usize) -> Self {
        NormStats {
            mean: vec![0.0; n],
            std: vec![1.0; n],
        }
    }

    pub fn fit(ds: &Dataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(LearnError::Data("cannot fit normalization on zero rows".into()));
        }
        let d = ds.n_features();
        let n = ds.len() as f64;
        let mut mean = vec![0.0; d];
        for r in ds.rows() {
            for (m, x) in mean.iter_mut().zip(&r.features) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; d];
        for r in ds.rows() {
            for ((v, x), m) in var.iter_mut().zip(&r.features).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        let std = var.into_iter().map(|v| if v > 0.0 { v.sqrt() } else { 1.0 }).collect();
        Ok(NormStats { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dataset;

    #[test]
    fn standardizes_training_rows() {
        let ds = dataset(30, 20, 4);
        let s = NormStats::fit(&ds).unwrap();
        let z: Vec<Vec<f64>> = ds.rows().iter().map(|r| s.apply(&r.features)).collect();
        for j in 0..4 {
            let m: f64 = z.iter().map(|r| r[j]).sum::<f64>() / 50.0;
            let v: f64 = z.iter().map(|r| r[j] * r[j]).sum::<f64>() / 50.0;
            assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
        }
    }
}
