//! Per-category scoring of fused verdicts.
//!
//! A sample counts as correct when the fused label equals the OR of its two
//! source labels. The strict column additionally requires each modality's
//! own label to be right.

use std::collections::BTreeMap;
use std::path::Path;

use deepfuse_core::{FourWayCategory, Label};
use serde::Serialize;

use crate::assemble::FourWaySample;
use crate::error::{io, FusionError, Result};
use crate::verdict::{fuse, FusionVerdict, Modality, ModalityVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CategoryRow {
    pub category: FourWayCategory,
    pub samples: usize,
    pub correct: usize,
    pub strict_correct: usize,
}

impl CategoryRow {
    pub fn accuracy(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.correct as f64 / self.samples as f64
        }
    }
}

/// Correct over total across rows.
pub fn overall_accuracy(rows: &[CategoryRow]) -> f64 {
    let total: usize = rows.iter().map(|r| r.samples).sum();
    let correct: usize = rows.iter().map(|r| r.correct).sum();
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleVerdict {
    pub sample_id: String,
    pub category: FourWayCategory,
    pub video_id: String,
    pub audio_id: String,
    pub truth: Label,
    pub verdict: FusionVerdict,
    pub correct: bool,
    pub strict_correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    /// One row per category in table order.
    pub rows: Vec<CategoryRow>,
    pub samples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub strict_accuracy: f64,
    #[serde(skip)]
    pub verdicts: Vec<SampleVerdict>,
}

/// Scores `set` given deepfake probabilities keyed by video and audio id.
pub fn evaluate_multimodal(
    set: &[FourWaySample],
    video_probs: &BTreeMap<String, f64>,
    audio_probs: &BTreeMap<String, f64>,
    video_model: &str,
    audio_model: &str,
) -> Result<Evaluation> {
    let mut rows: Vec<CategoryRow> = FourWayCategory::ALL
        .iter()
        .map(|&category| CategoryRow {
            category,
            samples: 0,
            correct: 0,
            strict_correct: 0,
        })
        .collect();
    let mut verdicts = Vec::with_capacity(set.len());
    for s in set {
        let lookup = |probs: &BTreeMap<String, f64>, id: &str, modality: &'static str| {
            probs.get(id).copied().ok_or_else(|| FusionError::Missing {
                sample: s.sample_id.clone(),
                modality,
                id: id.to_string(),
            })
        };
        let video = ModalityVerdict::new(Modality::Video, video_model, lookup(video_probs, &s.video_id, "video")?)?;
        let audio = ModalityVerdict::new(Modality::Audio, audio_model, lookup(audio_probs, &s.audio_id, "audio")?)?;
        let strict = video.label == s.video_label() && audio.label == s.audio_label();
        let verdict = fuse(video, audio);
        let truth = s.truth();
        let correct = verdict.combined_label == truth;
        let row = &mut rows[s.category.index()];
        row.samples += 1;
        row.correct += usize::from(correct);
        row.strict_correct += usize::from(strict);
        verdicts.push(SampleVerdict {
            sample_id: s.sample_id.clone(),
            category: s.category,
            video_id: s.video_id.clone(),
            audio_id: s.audio_id.clone(),
            truth,
            verdict,
            correct,
            strict_correct: strict,
        });
    }
    let samples = set.len();
    let strict: usize = rows.iter().map(|r| r.strict_correct).sum();
    Ok(Evaluation {
        samples,
        correct: rows.iter().map(|r| r.correct).sum(),
        accuracy: overall_accuracy(&rows),
        strict_accuracy: if samples == 0 { 0.0 } else { strict as f64 / samples as f64 },
        rows,
        verdicts,
    })
}

/// `category,samples,correct,strict_correct`, one row per category.
pub fn write_category_csv(eval: &Evaluation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["category", "samples", "correct", "strict_correct"])?;
    for r in &eval.rows {
        w.write_record([
            r.category.name().to_string(),
            r.samples.to_string(),
            r.correct.to_string(),
            r.strict_correct.to_string(),
        ])?;
    }
    w.flush().map_err(|e| io(path, e))?;
    Ok(())
}

pub fn write_verdicts_csv(eval: &Evaluation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "sample_id",
        "category",
        "video_id",
        "audio_id",
        "video_probability",
        "audio_probability",
        "video_label",
        "audio_label",
        "combined_label",
        "truth",
        "correct",
        "strict_correct",
    ])?;
    for v in &eval.verdicts {
        w.write_record([
            v.sample_id.clone(),
            v.category.name().to_string(),
            v.video_id.clone(),
            v.audio_id.clone(),
            v.verdict.video.probability.to_string(),
            v.verdict.audio.probability.to_string(),
            v.verdict.video.label.to_string(),
            v.verdict.audio.label.to_string(),
            v.verdict.combined_label.to_string(),
            v.truth.to_string(),
            u8::from(v.correct).to_string(),
            u8::from(v.strict_correct).to_string(),
        ])?;
    }
    w.flush().map_err(|e| io(path, e))?;
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    samples: usize,
    correct: usize,
    overall_accuracy: f64,
    strict_accuracy: f64,
    per_category: BTreeMap<&'static str, CategorySummary>,
}

#[derive(Serialize)]
struct CategorySummary {
    samples: usize,
    correct: usize,
    accuracy: f64,
}

pub fn summary_json(eval: &Evaluation) -> Result<String> {
    let s = Summary {
        samples: eval.samples,
        correct: eval.correct,
        overall_accuracy: eval.accuracy,
        strict_accuracy: eval.strict_accuracy,
        per_category: eval
            .rows
            .iter()
            .map(|r| {
                (
                    r.category.name(),
                    CategorySummary {
                        samples: r.samples,
                        correct: r.correct,
                        accuracy: r.accuracy(),
                    },
                )
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&s)?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::{assemble_fourway, PoolItem};
    use deepfuse_core::SeededRng;

    fn set() -> (Vec<FourWaySample>, Vec<PoolItem>, Vec<PoolItem>) {
        let videos: Vec<PoolItem> = (0..8)
            .map(|i| PoolItem::new(format!("v{i}"), if i < 4 { Label::Real } else { Label::Deepfake }))
            .collect();
        let audios: Vec<PoolItem> = (0..8)
            .map(|i| PoolItem::new(format!("a{i}"), if i % 2 == 0 { Label::Real } else { Label::Deepfake }))
            .collect();
        (assemble_fourway(&videos, &audios, &mut SeededRng::new(1)).unwrap(), videos, audios)
    }

    fn probs(items: &[PoolItem], f: impl Fn(&PoolItem) -> f64) -> BTreeMap<String, f64> {
        items.iter().map(|i| (i.id.clone(), f(i))).collect()
    }

    #[test]
    fn perfect_models_score_everything() {
        let (s, v, a) = set();
        let e = evaluate_multimodal(&s, &probs(&v, |i| i.label.as_f64()), &probs(&a, |i| i.label.as_f64()), "v", "a").unwrap();
        assert_eq!(e.accuracy, 1.0);
        assert_eq!(e.strict_accuracy, 1.0);
        assert!(e.rows.iter().all(|r| r.samples == 2 && r.correct == 2));
    }

    #[test]
    fn always_real_video_model() {
        let (s, v, a) = set();
        let e = evaluate_multimodal(&s, &probs(&v, |_| 0.0), &probs(&a, |i| i.label.as_f64()), "v", "a").unwrap();
        let correct: Vec<usize> = e.rows.iter().map(|r| r.correct).collect();
        assert_eq!(correct, vec![2, 2, 0, 2]);
        let strict: Vec<usize> = e.rows.iter().map(|r| r.strict_correct).collect();
        assert_eq!(strict, vec![2, 2, 0, 0]);
    }

    #[test]
    fn missing_prediction_is_an_error() {
        let (s, v, a) = set();
        let mut vp = probs(&v, |_| 0.0);
        vp.remove(&s[0].video_id);
        assert!(matches!(
            evaluate_multimodal(&s, &vp, &probs(&a, |_| 0.0), "v", "a"),
            Err(FusionError::Missing { .. })
        ));
    }

    #[test]
    fn recorded_table_arithmetic() {
        let rows: Vec<CategoryRow> = FourWayCategory::ALL
            .iter()
            .zip([(528, 502), (523, 496), (513, 477), (515, 480)])
            .map(|(&category, (samples, correct))| CategoryRow {
                category,
                samples,
                correct,
                strict_correct: 0,
            })
            .collect();
        assert!((overall_accuracy(&rows) - 0.9404).abs() < 1e-4);
    }

    #[test]
    fn csv_and_summary() {
        let (s, v, a) = set();
        let e = evaluate_multimodal(&s, &probs(&v, |_| 0.2), &probs(&a, |_| 0.7), "v", "a").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_category_csv(&e, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "category,samples,correct,strict_correct");
        assert_eq!(text.lines().count(), 5);
        let j: serde_json::Value = serde_json::from_str(&summary_json(&e).unwrap()).unwrap();
        assert_eq!(j["samples"], 8);
        write_verdicts_csv(&e, dir.path().join("v.csv")).unwrap();
    }
}
