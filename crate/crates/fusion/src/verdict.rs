use deepfuse_core::{FourWayCategory, Label};
use serde::Serialize;

use crate::error::{FusionError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Video,
    Audio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalityVerdict {
    pub modality: Modality,
    pub model_id: String,
    pub probability: f64,
    pub label: Label,
}

impl ModalityVerdict {
    pub fn new(modality: Modality, model_id: impl Into<String>, probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(FusionError::Probability(probability));
        }
        Ok(ModalityVerdict {
            modality,
            model_id: model_id.into(),
            probability,
            label: Label::from_probability(probability),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionVerdict {
    pub video: ModalityVerdict,
    pub audio: ModalityVerdict,
    pub combined_label: Label,
    pub category: FourWayCategory,
}

/// Deepfake when either modality says so.
pub fn combine(video: Label, audio: Label) -> Label {
    if video == Label::Deepfake || audio == Label::Deepfake {
        Label::Deepfake
    } else {
        Label::Real
    }
}

pub fn fuse(video: ModalityVerdict, audio: ModalityVerdict) -> FusionVerdict {
    FusionVerdict {
        combined_label: combine(video.label, audio.label),
        category: FourWayCategory::from_labels(video.label, audio.label),
        video,
        audio,
    }
}
