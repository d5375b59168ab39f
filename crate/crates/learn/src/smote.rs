//! Synthetic minority oversampling.
//!
//! Minority rows are used as bases in round-robin order; each synthetic row
//! is `x + u·(x_nn − x)` with `x_nn` drawn from the base's `k` nearest
//! minority neighbours (Euclidean, ties by row order) and `u ∈ [0, 1)`.

use deepfuse_core::{Dataset, Label, Sample, SeededRng};

use crate::error::{LearnError, Result};

pub const DEFAULT_K: usize = 5;

/// How one synthetic row was generated; indices refer to the input dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecord {
    pub id: String,
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput {
    /// Original rows followed by the synthetic ones.
    pub dataset: Dataset,
    pub synthetic: Vec<SyntheticRecord>,
    pub minority: Option<Label>,
    /// Neighbour count actually used (`k` clamped to minority size − 1).
    pub k_used: usize,
    pub warnings: Vec<String>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn smote(ds: &Dataset, k: usize, rng: &mut SeededRng) -> Result<SmoteOutput> {
    if k == 0 {
        return Err(LearnError::Config("SMOTE needs k >= 1".into()));
    }
    let labels = ds.labels()?;
    let [n_real, n_fake] = ds.class_counts();
    let mut out = SmoteOutput {
        dataset: ds.clone(),
        synthetic: vec![],
        minority: None,
        k_used: 0,
        warnings: vec![],
    };
    if n_real == n_fake {
        return Ok(out);
    }
    let (minority, needed) = if n_real < n_fake {
        (Label::Real, n_fake - n_real)
    } else {
        (Label::Deepfake, n_real - n_fake)
    };
    out.minority = Some(minority);
    let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == minority).collect();
    if members.is_empty() {
        return Err(LearnError::Data(format!("no {} rows to oversample", minority.name())));
    }
    let rows = ds.rows();
    let k_used = k.min(members.len() - 1);
    out.k_used = k_used;
    if k_used < k {
        out.warnings.push(format!(
            "minority class has {} rows; using k = {k_used} instead of {k}",
            members.len()
        ));
    }
    let neighbors: Vec<Vec<usize>> = members
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (dist2(&rows[i].features, &rows[j].features), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k_used).map(|(_, j)| j).collect()
        })
        .collect();
    let degenerate = neighbors
        .iter()
        .zip(&members)
        .all(|(nn, &i)| nn.iter().all(|&j| rows[j].features == rows[i].features));
    if degenerate {
        out.warnings
            .push("minority rows are all identical; synthetic rows duplicate them".into());
    }
    let mut new_rows = ds.rows().to_vec();
    for s in 0..needed {
        let m = s % members.len();
        let base = members[m];
        let (neighbor, u) = if neighbors[m].is_empty() {
            (base, 0.0)
        } else {
            (neighbors[m][rng.below(neighbors[m].len())], rng.uniform())
        };
        let x = &rows[base].features;
        let features = x
            .iter()
            .zip(&rows[neighbor].features)
            .map(|(a, b)| a + u * (b - a))
            .collect();
        let id = format!("{}#smote{}", rows[base].id, s);
        new_rows.push(Sample {
            id: id.clone(),
            features,
            label: Some(minority),
        });
        out.synthetic.push(SyntheticRecord { id, base, neighbor, u });
    }
    for w in &out.warnings {
        log::warn!("{w}");
    }
    out.dataset = Dataset::new(new_rows)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dataset;

    #[test]
    fn balances_ten_and_four() {
        let ds = dataset(10, 4, 3);
        let out = smote(&ds, DEFAULT_K, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.dataset.class_counts(), [10, 10]);
        assert_eq!(out.k_used, 3);
        assert_eq!(out.synthetic.len(), 6);
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn synthetic_rows_lie_on_generating_segments() {
        let ds = dataset(40, 13, 4);
        let out = smote(&ds, DEFAULT_K, &mut SeededRng::new(2)).unwrap();
        let rows = out.dataset.rows();
        for (rec, row) in out.synthetic.iter().zip(&rows[ds.len()..]) {
            assert_eq!(rec.id, row.id);
            assert!((0.0..1.0).contains(&rec.u));
            let a = &ds.rows()[rec.base].features;
            let b = &ds.rows()[rec.neighbor].features;
            assert_eq!(ds.rows()[rec.neighbor].label, ds.rows()[rec.base].label);
            for ((x, p), q) in row.features.iter().zip(a).zip(b) {
                assert!((x - (p + rec.u * (q - p))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_minority_duplicates_points() {
        let mut rows = dataset(6, 0, 2).into_rows();
        for i in 0..3 {
            rows.push(Sample {
                id: format!("m{i}"),
                features: vec![1.0, 2.0],
                label: Some(Label::Deepfake),
            });
        }
        let out = smote(&Dataset::new(rows).unwrap(), 5, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.dataset.class_counts(), [6, 6]);
        assert!(out.dataset.rows()[9..].iter().all(|r| r.features == vec![1.0, 2.0]));
        assert!(out.warnings.iter().any(|w| w.contains("identical")));
    }

    #[test]
    fn balanced_input_unchanged() {
        let ds = dataset(5, 5, 2);
        let out = smote(&ds, 5, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.dataset, ds);
        assert!(out.synthetic.is_empty());
    }
}
