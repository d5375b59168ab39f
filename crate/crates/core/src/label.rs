use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Binary ground truth for one modality: 0 = real, 1 = deepfake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Real = 0,
    Deepfake = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Real, Label::Deepfake];

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Real),
            1 => Some(Label::Deepfake),
            _ => None,
        }
    }

    /// Threshold a probability of "deepfake" at 0.5 (inclusive).
    pub fn from_probability(p: f64) -> Label {
        if p >= 0.5 {
            Label::Deepfake
        } else {
            Label::Real
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_u8())
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Deepfake => "deepfake",
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l.as_u8()
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Label::from_u8(v).ok_or_else(|| format!("label must be 0 or 1, got {v}"))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" | "real" => Ok(Label::Real),
            "1" | "deepfake" | "fake" => Ok(Label::Deepfake),
            other => Err(format!("unrecognized label {other:?}")),
        }
    }
}

/// Video/audio label pairing used in the multimodal evaluation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourWayCategory {
    RealReal,
    RealDeepfake,
    DeepfakeReal,
    DeepfakeDeepfake,
}

impl FourWayCategory {
    /// Table order: (0,0), (0,1), (1,0), (1,1).
    pub const ALL: [FourWayCategory; 4] = [
        FourWayCategory::RealReal,
        FourWayCategory::RealDeepfake,
        FourWayCategory::DeepfakeReal,
        FourWayCategory::DeepfakeDeepfake,
    ];

    pub fn from_labels(video: Label, audio: Label) -> Self {
        match (video, audio) {
            (Label::Real, Label::Real) => FourWayCategory::RealReal,
            (Label::Real, Label::Deepfake) => FourWayCategory::RealDeepfake,
            (Label::Deepfake, Label::Real) => FourWayCategory::DeepfakeReal,
            (Label::Deepfake, Label::Deepfake) => FourWayCategory::DeepfakeDeepfake,
        }
    }

    pub fn video_label(self) -> Label {
        self.labels().0
    }

    pub fn audio_label(self) -> Label {
        self.labels().1
    }

    pub fn labels(self) -> (Label, Label) {
        match self {
            FourWayCategory::RealReal => (Label::Real, Label::Real),
            FourWayCategory::RealDeepfake => (Label::Real, Label::Deepfake),
            FourWayCategory::DeepfakeReal => (Label::Deepfake, Label::Real),
            FourWayCategory::DeepfakeDeepfake => (Label::Deepfake, Label::Deepfake),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FourWayCategory::RealReal => "real-real",
            FourWayCategory::RealDeepfake => "real-deepfake",
            FourWayCategory::DeepfakeReal => "deepfake-real",
            FourWayCategory::DeepfakeDeepfake => "deepfake-deepfake",
        }
    }
}

impl fmt::Display for FourWayCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FourWayCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FourWayCategory::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}
