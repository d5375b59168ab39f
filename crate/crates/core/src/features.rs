use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::label::Label;

pub const N_FEATURES: usize = 13;

/// Column order of the per-video feature vector.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "cheekbone_height",
    "inter_pupil_distance",
    "blink_count",
    "headpose_x",
    "headpose_y",
    "headpose_z",
    "nose_size",
    "lip_size",
    "contrast",
    "correlation",
    "luminance",
    "chrominance1",
    "chrominance2",
];

pub mod col {
    pub const CHEEKBONE_HEIGHT: usize = 0;
    pub const INTER_PUPIL_DISTANCE: usize = 1;
    pub const BLINK_COUNT: usize = 2;
    pub const HEADPOSE_X: usize = 3;
    pub const HEADPOSE_Y: usize = 4;
    pub const HEADPOSE_Z: usize = 5;
    pub const NOSE_SIZE: usize = 6;
    pub const LIP_SIZE: usize = 7;
    pub const CONTRAST: usize = 8;
    pub const CORRELATION: usize = 9;
    pub const LUMINANCE: usize = 10;
    pub const CHROMINANCE1: usize = 11;
    pub const CHROMINANCE2: usize = 12;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoFeatureVector {
    pub video_id: String,
    pub values: [f64; N_FEATURES],
    pub label: Option<Label>,
}

impl VideoFeatureVector {
    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::Dataset(format!(
                "{}: feature {} is not finite",
                self.video_id, FEATURE_NAMES[i]
            )));
        }
        if self.values[col::BLINK_COUNT] < 0.0 {
            return Err(CoreError::Dataset(format!("{}: negative blink_count", self.video_id)));
        }
        if self.values[col::CONTRAST] < 0.0 {
            return Err(CoreError::Dataset(format!("{}: negative contrast", self.video_id)));
        }
        Ok(())
    }

    pub fn to_sample(&self) -> Sample {
        Sample {
            id: self.video_id.clone(),
            features: self.values.to_vec(),
            label: self.label,
        }
    }
}

/// One row of a numeric dataset of any width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub features: Vec<f64>,
    pub label: Option<Label>,
}

/// Rows with unique ids and a common feature width.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    rows: Vec<Sample>,
}

impl Dataset {
    pub fn new(rows: Vec<Sample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        let width = rows.first().map(|r| r.features.len());
        for r in &rows {
            if !seen.insert(r.id.as_str()) {
                return Err(CoreError::Dataset(format!("duplicate id {:?}", r.id)));
            }
            if Some(r.features.len()) != width {
                return Err(CoreError::Dataset(format!(
                    "row {:?} has {} features, expected {}",
                    r.id,
                    r.features.len(),
                    width.unwrap_or(0)
                )));
            }
        }
        Ok(Dataset { rows })
    }

    pub fn from_vectors(rows: &[VideoFeatureVector]) -> Result<Self> {
        Dataset::new(rows.iter().map(VideoFeatureVector::to_sample).collect())
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Sample> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.rows.first().map_or(0, |r| r.features.len())
    }

    /// Counts of `[real, deepfake]` among labeled rows.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0; 2];
        for r in &self.rows {
            if let Some(l) = r.label {
                c[l.as_u8() as usize] += 1;
            }
        }
        c
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.rows.iter().all(|r| r.label.is_some())
    }

    /// Subset in the given index order.
    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn labels(&self) -> Result<Vec<Label>> {
        self.rows
            .iter()
            .map(|r| {
                r.label
                    .ok_or_else(|| CoreError::Dataset(format!("row {:?} is unlabeled", r.id)))
            })
            .collect()
    }

    pub fn to_vectors(&self) -> Result<Vec<VideoFeatureVector>> {
        self.rows
            .iter()
            .map(|r| {
                let values: [f64; N_FEATURES] = r.features.as_slice().try_into().map_err(|_| {
                    CoreError::Dataset(format!(
                        "row {:?} has {} features, expected {N_FEATURES}",
                        r.id,
                        r.features.len()
                    ))
                })?;
                Ok(VideoFeatureVector {
                    video_id: r.id.clone(),
                    values,
                    label: r.label,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, label: Option<Label>) -> Sample {
        Sample {
            id: id.into(),
            features: vec![1.0, 2.0],
            label,
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(Dataset::new(vec![sample("a", None), sample("a", None)]).is_err());
    }

    #[test]
    fn class_counts_follow_rows() {
        let ds = Dataset::new(vec![
            sample("a", Some(Label::Real)),
            sample("b", Some(Label::Deepfake)),
            sample("c", Some(Label::Deepfake)),
            sample("d", None),
        ])
        .unwrap();
        assert_eq!(ds.class_counts(), [1, 2]);
        assert!(!ds.is_fully_labeled());
        assert!(ds.labels().is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut b = sample("b", None);
        b.features.push(3.0);
        assert!(Dataset::new(vec![sample("a", None), b]).is_err());
    }

    #[test]
    fn feature_vector_invariants() {
        let mut v = VideoFeatureVector {
            video_id: "x".into(),
            values: [0.0; N_FEATURES],
            label: None,
        };
        assert!(v.validate().is_ok());
        v.values[col::CONTRAST] = -1.0;
        assert!(v.validate().is_err());
        v.values[col::CONTRAST] = f64::NAN;
        assert!(v.validate().is_err());
    }
}
