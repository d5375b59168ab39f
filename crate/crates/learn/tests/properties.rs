use std::collections::BTreeSet;

use deepfuse_core::{Dataset, Label, Sample, SeededRng};
use deepfuse_learn::{classification_report, smote, train_test_split};
use proptest::prelude::*;

fn dataset(n_real: usize, n_fake: usize, seed: u64) -> Dataset {
    let mut rng = SeededRng::new(seed);
    let rows = (0..n_real + n_fake)
        .map(|i| Sample {
            id: format!("s{i}"),
            features: (0..4).map(|_| rng.normal()).collect(),
            label: Some(if i < n_real { Label::Real } else { Label::Deepfake }),
        })
        .collect();
    Dataset::new(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_partitions_and_keeps_both_classes(n_real in 2usize..40, n_fake in 2usize..40, ratio in 0.1f64..0.9, seed in 0u64..1000) {
        let ds = dataset(n_real, n_fake, seed);
        let (train, test) = train_test_split(&ds, ratio, &mut SeededRng::new(seed)).unwrap();
        let ids = |d: &Dataset| d.rows().iter().map(|r| r.id.clone()).collect::<BTreeSet<_>>();
        let (a, b) = (ids(&train), ids(&test));
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(a.len() + b.len(), ds.len());
        for side in [&train, &test] {
            let c = side.class_counts();
            prop_assert!(c[0] >= 1 && c[1] >= 1);
        }
    }

    #[test]
    fn smote_balances_along_segments(n_real in 2usize..30, n_fake in 2usize..30, k in 1usize..7, seed in 0u64..1000) {
        let ds = dataset(n_real, n_fake, seed);
        let out = smote(&ds, k, &mut SeededRng::new(seed)).unwrap();
        let c = out.dataset.class_counts();
        prop_assert_eq!(c[0], c[1]);
        prop_assert_eq!(out.synthetic.len(), n_real.abs_diff(n_fake));
        let n = ds.len();
        for (rec, row) in out.synthetic.iter().zip(&out.dataset.rows()[n..]) {
            prop_assert_eq!(&rec.id, &row.id);
            let (a, b) = (&ds.rows()[rec.base].features, &ds.rows()[rec.neighbor].features);
            for ((v, x), y) in row.features.iter().zip(a).zip(b) {
                prop_assert!((v - (x + rec.u * (y - x))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn report_accuracy_is_diagonal_share(pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..200)) {
        let t: Vec<Label> = pairs.iter().map(|p| Label::from_u8(p.0).unwrap()).collect();
        let p: Vec<Label> = pairs.iter().map(|p| Label::from_u8(p.1).unwrap()).collect();
        let r = classification_report(&t, &p).unwrap();
        let agree = pairs.iter().filter(|p| p.0 == p.1).count();
        prop_assert_eq!(r.accuracy, agree as f64 / pairs.len() as f64);
        prop_assert_eq!(r.confusion.total(), pairs.len());
        prop_assert_eq!(r.real.support + r.deepfake.support, pairs.len());
    }
}
