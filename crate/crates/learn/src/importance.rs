use deepfuse_core::{Dataset, SeededRng};
use serde::Serialize;

use crate::error::{LearnError, Result};
use crate::Classifier;

pub const DEFAULT_REPEATS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: usize,
    pub name: String,
    /// Mean accuracy drop over the shuffles.
    pub importance: f64,
    pub std: f64,
}

fn accuracy(model: &dyn Classifier, rows: &[Vec<f64>], y: &[u8]) -> f64 {
    rows.iter()
        .zip(y)
        .filter(|(x, &t)| model.predict(x).as_u8() == t)
        .count() as f64
        / y.len() as f64
}

/// Accuracy drop when each column is shuffled, sorted by decreasing
/// importance (ties by column order). `names` labels the columns.
pub fn permutation_importance(
    model: &dyn Classifier,
    test: &Dataset,
    names: &[&str],
    repeats: usize,
    rng: &mut SeededRng,
) -> Result<Vec<FeatureImportance>> {
    if test.is_empty() || repeats == 0 {
        return Err(LearnError::Data("importance needs test rows and at least one shuffle".into()));
    }
    let d = test.n_features();
    if d != model.n_features() || names.len() != d {
        return Err(LearnError::Shape(format!(
            "model expects {} features, data has {d}, {} names",
            model.n_features(),
            names.len()
        )));
    }
    let y: Vec<u8> = test.labels()?.iter().map(|l| l.as_u8()).collect();
    let mut rows: Vec<Vec<f64>> = test.rows().iter().map(|r| r.features.clone()).collect();
    let baseline = accuracy(model, &rows, &y);
    let mut out = Vec::with_capacity(d);
    for f in 0..d {
        let original: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        let mut drops = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let mut col = original.clone();
            rng.shuffle(&mut col);
            for (r, v) in rows.iter_mut().zip(&col) {
                r[f] = *v;
            }
            drops.push(baseline - accuracy(model, &rows, &y));
        }
        for (r, v) in rows.iter_mut().zip(&original) {
            r[f] = *v;
        }
        let mean = drops.iter().sum::<f64>() / repeats as f64;
        let var = drops.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / repeats as f64;
        out.push(FeatureImportance {
            feature: f,
            name: names[f].to_string(),
            importance: mean,
            std: var.sqrt(),
        });
    }
    out.sort_by(|a, b| b.importance.total_cmp(&a.importance).then(a.feature.cmp(&b.feature)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use deepfuse_core::{Label, Sample};

    struct Threshold(usize);

    impl Classifier for Threshold {
        fn n_features(&self) -> usize {
            3
        }
        fn predict_proba(&self, x: &[f64]) -> f64 {
            if x[self.0] > 0.0 { 1.0 } else { 0.0 }
        }
    }

    fn data() -> Dataset {
        let mut rng = SeededRng::new(3);
        Dataset::new(
            (0..200)
                .map(|i| {
                    let x: Vec<f64> = (0..3).map(|_| rng.normal()).collect();
                    Sample {
                        id: i.to_string(),
                        label: Some(if x[1] > 0.0 { Label::Deepfake } else { Label::Real }),
                        features: x,
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn used_feature_dominates_and_unused_are_zero() {
        let ds = data();
        let imp = permutation_importance(&Threshold(1), &ds, &["a", "b", "c"], 10, &mut SeededRng::new(1)).unwrap();
        assert_eq!(imp[0].name, "b");
        assert!(imp[0].importance > 0.3);
        for i in &imp[1..] {
            assert_eq!(i.importance, 0.0);
        }
        let again = permutation_importance(&Threshold(1), &ds, &["a", "b", "c"], 10, &mut SeededRng::new(1)).unwrap();
        assert_eq!(imp, again);
    }

    #[test]
    fn schema_mismatch() {
        assert!(permutation_importance(&Threshold(0), &data(), &["a", "b"], 10, &mut SeededRng::new(1)).is_err());
    }
}
