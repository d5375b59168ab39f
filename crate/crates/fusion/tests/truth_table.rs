use std::collections::BTreeMap;

use deepfuse_core::{FourWayCategory, Label, SeededRng};
use deepfuse_fusion::{assemble_fourway, evaluate_multimodal, read_pairs_csv, write_pairs_csv, PoolItem};

/// Every combination of "video model right/wrong" × "audio model right/wrong",
/// checked against a direct enumeration of the OR rule.
#[test]
fn scoring_matches_enumeration() {
    let videos: Vec<PoolItem> = (0..12)
        .map(|i| PoolItem::new(format!("vid{i:02}"), if i % 3 == 0 { Label::Deepfake } else { Label::Real }))
        .collect();
    let audios: Vec<PoolItem> = (0..12)
        .map(|i| PoolItem::new(format!("aud{i:02}"), if i % 2 == 0 { Label::Deepfake } else { Label::Real }))
        .collect();
    let set = assemble_fourway(&videos, &audios, &mut SeededRng::new(3)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.csv");
    write_pairs_csv(&set, &path).unwrap();
    let set = read_pairs_csv(&path).unwrap();

    for video_right in [true, false] {
        for audio_right in [true, false] {
            let prob = |l: Label, right: bool| if (l == Label::Deepfake) == right { 0.9 } else { 0.1 };
            let vp: BTreeMap<String, f64> = videos.iter().map(|v| (v.id.clone(), prob(v.label, video_right))).collect();
            let ap: BTreeMap<String, f64> = audios.iter().map(|a| (a.id.clone(), prob(a.label, audio_right))).collect();
            let e = evaluate_multimodal(&set, &vp, &ap, "v", "a").unwrap();
            for row in &e.rows {
                let (tv, ta) = row.category.labels();
                let flip = |l: Label, right: bool| if right { l } else if l == Label::Real { Label::Deepfake } else { Label::Real };
                let predicted = flip(tv, video_right) == Label::Deepfake || flip(ta, audio_right) == Label::Deepfake;
                let truth = tv == Label::Deepfake || ta == Label::Deepfake;
                let expected = if predicted == truth { row.samples } else { 0 };
                assert_eq!(row.correct, expected, "{:?} video_right={video_right} audio_right={audio_right}", row.category);
                let strict = if video_right && audio_right { row.samples } else { 0 };
                assert_eq!(row.strict_correct, strict);
            }
            assert_eq!(e.rows.iter().map(|r| r.samples).sum::<usize>(), set.len());
            assert!(e.rows.iter().all(|r| r.category == FourWayCategory::ALL[r.category.index()]));
        }
    }
}
