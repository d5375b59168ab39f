use deepfuse_core::{Dataset, Label, SeededRng};

use crate::error::{LearnError, Result};

/// Stratified shuffle split. Each class contributes `round(ratio·n_c)` rows
/// to the training side, clamped so both sides keep at least one row of it.
/// Rows keep their original relative order on both sides.
pub fn train_test_split(ds: &Dataset, ratio: f64, rng: &mut SeededRng) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(LearnError::Config(format!("split ratio {ratio} outside (0, 1)")));
    }
    if ds.is_empty() {
        return Err(LearnError::Data("cannot split an empty dataset".into()));
    }
    let labels = ds.labels()?;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Label::Real, Label::Deepfake] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(LearnError::Data(format!(
                "class {} has {} member(s); stratified split needs at least 2",
                class.name(),
                idx.len()
            )));
        }
        rng.shuffle(&mut idx);
        let n_train = ((ratio * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select(&train), ds.select(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dataset;

    #[test]
    fn stratification_arithmetic() {
        let ds = dataset(50, 50, 3);
        let (tr, te) = train_test_split(&ds, 0.8, &mut SeededRng::new(1)).unwrap();
        assert_eq!((tr.len(), te.len()), (80, 20));
        assert_eq!(tr.class_counts(), [40, 40]);
        assert_eq!(te.class_counts(), [10, 10]);
    }

    #[test]
    fn deterministic_partition() {
        let ds = dataset(37, 11, 2);
        let a = train_test_split(&ds, 0.8, &mut SeededRng::new(5)).unwrap();
        let b = train_test_split(&ds, 0.8, &mut SeededRng::new(5)).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<_> = a.0.rows().iter().chain(a.1.rows()).map(|r| r.id.clone()).collect();
        ids.sort();
        let mut orig: Vec<_> = ds.rows().iter().map(|r| r.id.clone()).collect();
        orig.sort();
        assert_eq!(ids, orig);
    }

    #[test]
    fn tiny_class_rejected() {
        let ds = dataset(10, 1, 2);
        assert!(train_test_split(&ds, 0.8, &mut SeededRng::new(1)).is_err());
        assert!(train_test_split(&dataset(4, 4, 1), 1.0, &mut SeededRng::new(1)).is_err());
    }
}
