//! Model files: one JSON document per trained model, tagged by `kind`.
//!
//! Floats are written in shortest round-trip form, so loading reproduces
//! every parameter bit for bit.

use std::path::Path;
use std::str::FromStr;

use deepfuse_core::Label;
use serde::{Deserialize, Serialize};

use crate::ann::{AnnConfig, AnnModel};
use crate::cnn::{CnnConfig, CnnModel};
use crate::error::{io, LearnError, Result};
use crate::forest::{ForestConfig, ForestModel};
use crate::tree::{TreeConfig, TreeModel};

pub const FORMAT_VERSION: u32 = 1;

/// Binary classifier over a fixed-width feature vector.
pub trait Classifier {
    fn n_features(&self) -> usize;

    /// Probability of the deepfake class.
    fn predict_proba(&self, x: &[f64]) -> f64;

    fn predict(&self, x: &[f64]) -> Label {
        Label::from_probability(self.predict_proba(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ann,
    Cnn,
    Tree,
    Forest,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ann => "ann",
            ModelKind::Cnn => "cnn",
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ann" => Ok(ModelKind::Ann),
            "cnn" => Ok(ModelKind::Cnn),
            "tree" => Ok(ModelKind::Tree),
            "forest" => Ok(ModelKind::Forest),
            other => Err(format!("unknown model kind '{other}' (ann | cnn | tree | forest)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Ann { config: AnnConfig, network: AnnModel },
    Cnn { config: CnnConfig, network: CnnModel, floor_db: f64 },
    Tree { config: TreeConfig, tree: TreeModel },
    Forest { config: ForestConfig, forest: ForestModel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: u32,
    pub seed: u64,
    /// Column names of tabular models; empty for the spectrogram network.
    pub feature_names: Vec<String>,
    #[serde(flatten)]
    pub model: Model,
}

impl ModelBundle {
    pub fn new(seed: u64, feature_names: Vec<String>, model: Model) -> Self {
        ModelBundle {
            format: FORMAT_VERSION,
            seed,
            feature_names,
            model,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::Ann { .. } => ModelKind::Ann,
            Model::Cnn { .. } => ModelKind::Cnn,
            Model::Tree { .. } => ModelKind::Tree,
            Model::Forest { .. } => ModelKind::Forest,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != FORMAT_VERSION {
            return Err(LearnError::Model(format!("unsupported format version {}", self.format)));
        }
        match &self.model {
            Model::Ann { network, .. } => network.validate()?,
            Model::Cnn { network, floor_db, .. } => {
                network.validate()?;
                if !(*floor_db < 0.0) {
                    return Err(LearnError::Model(format!("dB floor {floor_db} must be negative")));
                }
            }
            Model::Tree { tree, .. } => tree.validate()?,
            Model::Forest { forest, .. } => forest.validate()?,
        }
        if let Some(c) = self.classifier() {
            if c.n_features() != self.feature_names.len() {
                return Err(LearnError::Model(format!(
                    "{} feature names for a {}-input model",
                    self.feature_names.len(),
                    c.n_features()
                )));
            }
        }
        Ok(())
    }

    /// The tabular classifier, if this is not the spectrogram network.
    pub fn classifier(&self) -> Option<&dyn Classifier> {
        match &self.model {
            Model::Ann { network, .. } => Some(network),
            Model::Tree { tree, .. } => Some(tree),
            Model::Forest { forest, .. } => Some(forest),
            Model::Cnn { .. } => None,
        }
    }

    pub fn expect_kind(&self, allowed: &[ModelKind]) -> Result<()> {
        if allowed.contains(&self.kind()) {
            Ok(())
        } else {
            Err(LearnError::Model(format!(
                "expected a {} model, found {}",
                allowed.iter().map(|k| k.name()).collect::<Vec<_>>().join("/"),
                self.kind().name()
            )))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: ModelBundle = serde_json::from_str(s)?;
        b.validate()?;
        Ok(b)
    }
}

pub fn save_model(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    bundle.validate()?;
    std::fs::write(path, bundle.to_json()?).map_err(|e| io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    ModelBundle::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dataset;
    use crate::{ann_train, forest_train};
    use deepfuse_core::SeededRng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn ann_round_trip_is_bitwise() {
        let ds = dataset(30, 30, 4);
        let config = AnnConfig { epochs: 3, ..AnnConfig::default() };
        let (network, _) = ann_train(&ds, &config, &mut SeededRng::new(1)).unwrap();
        let b = ModelBundle::new(1, names(4), Model::Ann { config, network });
        let back = ModelBundle::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(back, b);
        let (c1, c2) = (b.classifier().unwrap(), back.classifier().unwrap());
        for r in ds.rows() {
            assert_eq!(c1.predict_proba(&r.features).to_bits(), c2.predict_proba(&r.features).to_bits());
        }
    }

    #[test]
    fn forest_round_trip() {
        let ds = dataset(40, 40, 5);
        let config = ForestConfig::default();
        let forest = forest_train(&ds, &config, &mut SeededRng::new(3)).unwrap();
        let b = ModelBundle::new(3, names(5), Model::Forest { config, forest });
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.json");
        save_model(&b, &p).unwrap();
        let back = load_model(&p).unwrap();
        assert_eq!(back.kind(), ModelKind::Forest);
        for r in ds.rows() {
            assert_eq!(b.classifier().unwrap().predict(&r.features), back.classifier().unwrap().predict(&r.features));
        }
    }

    #[test]
    fn tampered_dimensions_rejected() {
        let ds = dataset(10, 10, 3);
        let config = AnnConfig { epochs: 1, hidden: vec![4], ..AnnConfig::default() };
        let (network, _) = ann_train(&ds, &config, &mut SeededRng::new(1)).unwrap();
        let b = ModelBundle::new(1, names(3), Model::Ann { config, network });
        let mut v: serde_json::Value = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        v["network"]["layer_dims"][1] = serde_json::json!(5);
        assert!(ModelBundle::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        v["kind"] = serde_json::json!("tree");
        assert!(ModelBundle::from_json(&v.to_string()).is_err());
        assert!(b.expect_kind(&[ModelKind::Forest]).is_err());
        b.expect_kind(&[ModelKind::Ann, ModelKind::Tree]).unwrap();
    }
}
