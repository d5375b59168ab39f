use deepfuse_core::features::col;
use deepfuse_core::{write_landmark_bundle, write_ppm, read_landmark_bundle, Label, SeededRng};
use deepfuse_vision::synthetic::SyntheticVideo;
use deepfuse_vision::{extract_video_features, ExtractConfig, ExtractionNote};

fn write_video(dir: &std::path::Path, video: &SyntheticVideo, seed: u64) -> std::path::PathBuf {
    let mut rng = SeededRng::new(seed);
    let (bundle, rois) = video.render(&mut rng);
    for (name, img) in &rois {
        write_ppm(img, dir.join(name)).unwrap();
    }
    let path = dir.join(format!("{}.json", video.video_id));
    write_landmark_bundle(&bundle, &path).unwrap();
    path
}

#[test]
fn synthetic_generating_values_are_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let mut video = SyntheticVideo::new("v1");
    video.n_frames = 40;
    video.closed_frames = vec![5, 6, 7, 20, 21, 30];
    let path = write_video(dir.path(), &video, 3);
    let bundle = read_landmark_bundle(&path).unwrap();
    let out = extract_video_features(&bundle, Some(Label::Real), &ExtractConfig::default()).unwrap();
    let v = &out.vector.values;
    // the single closed frame at 30 is below the run length
    assert_eq!(v[col::BLINK_COUNT], 2.0);
    assert!(v[col::NOSE_SIZE] > 0.0 && v[col::LIP_SIZE] > 0.0 && v[col::INTER_PUPIL_DISTANCE] > 0.0);
    assert!(v[col::CHEEKBONE_HEIGHT].is_finite());
    for a in [col::HEADPOSE_X, col::HEADPOSE_Y, col::HEADPOSE_Z] {
        assert!(v[a] > 0.5, "axis {a}: {}", v[a]);
    }
    for (k, p) in out.poses.iter().enumerate() {
        let truth = video.pose_at(k * 5);
        assert!((p.yaw - truth.yaw).abs() < 0.05, "{} vs {}", p.yaw, truth.yaw);
        assert!((p.pitch - truth.pitch).abs() < 0.05);
        assert!((p.roll - truth.roll).abs() < 0.05);
    }
    assert!(v[col::CONTRAST] > 0.0);
    assert!(v[col::CORRELATION] > -1.0 && v[col::CORRELATION] <= 1.0);
    assert!(v[col::LUMINANCE] > 100.0);
}

#[test]
fn still_head_has_zero_pose_spread() {
    let dir = tempfile::tempdir().unwrap();
    let mut video = SyntheticVideo::new("still");
    video.motion_deg = 0.0;
    let path = write_video(dir.path(), &video, 4);
    let bundle = read_landmark_bundle(&path).unwrap();
    let out = extract_video_features(&bundle, None, &ExtractConfig::default()).unwrap();
    for a in [col::HEADPOSE_X, col::HEADPOSE_Y, col::HEADPOSE_Z] {
        assert!(out.vector.values[a] < 1e-6);
    }
    assert_eq!(out.vector.label, None);
}

#[test]
fn flat_roi_substitutes_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let mut video = SyntheticVideo::new("flat");
    video.noise = 0.0;
    video.tint = [128.0, 128.0, 128.0];
    let mut rng = SeededRng::new(1);
    let (bundle, rois) = video.render(&mut rng);
    for (name, img) in &rois {
        let flat = deepfuse_core::RgbImage::new(img.width, img.height, vec![[128, 128, 128]; img.width * img.height]);
        write_ppm(&flat, dir.path().join(name)).unwrap();
    }
    let path = dir.path().join("flat.json");
    write_landmark_bundle(&bundle, &path).unwrap();
    let bundle = read_landmark_bundle(&path).unwrap();
    let out = extract_video_features(&bundle, None, &ExtractConfig::default()).unwrap();
    assert_eq!(out.vector.values[col::CORRELATION], 1.0);
    assert_eq!(out.vector.values[col::CONTRAST], 0.0);
    assert!(out
        .notes
        .iter()
        .any(|n| matches!(n, ExtractionNote::CorrelationDegenerate { .. })));
}

#[test]
fn bundle_without_rois_is_rejected() {
    let mut rng = SeededRng::new(1);
    let (mut bundle, _) = SyntheticVideo::new("x").render(&mut rng);
    bundle.roi_refs.clear();
    assert!(extract_video_features(&bundle, None, &ExtractConfig::default()).is_err());
}
