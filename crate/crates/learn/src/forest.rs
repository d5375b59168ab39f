use deepfuse_core::{Dataset, SeededRng};
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::tree::{tree_train_on, TreeConfig, TreeModel};
use crate::Classifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub tree: TreeConfig,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            bootstrap: true,
            tree: TreeConfig {
                max_features: Some(3),
                ..TreeConfig::default()
            },
        }
    }
}

/// Majority vote of the member trees; a tie counts as deepfake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_estimators: usize,
    pub trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.leaf_value(x) >= 0.5).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees.len() != self.n_estimators || self.trees.is_empty() {
            return Err(LearnError::Model(format!(
                "forest declares {} trees but holds {}",
                self.n_estimators,
                self.trees.len()
            )));
        }
        let d = self.trees[0].n_features;
        for t in &self.trees {
            if t.n_features != d {
                return Err(LearnError::Model("forest trees disagree on feature count".into()));
            }
            t.validate()?;
        }
        Ok(())
    }
}

impl Classifier for ForestModel {
    fn n_features(&self) -> usize {
        self.trees[0].n_features
    }

    /// Fraction of trees voting deepfake.
    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.votes(x) as f64 / self.trees.len() as f64
    }
}

/// Trees are grown one after another from the same generator: each draws its
/// bootstrap sample (when enabled) and then its per-split feature subsets.
pub fn forest_train(ds: &Dataset, cfg: &ForestConfig, rng: &mut SeededRng) -> Result<ForestModel> {
    if cfg.n_estimators == 0 {
        return Err(LearnError::Config("forest needs at least one tree".into()));
    }
    if ds.is_empty() {
        return Err(LearnError::Data("empty training set".into()));
    }
    let n = ds.len();
    let all: Vec<usize> = (0..n).collect();
    let mut trees = Vec::with_capacity(cfg.n_estimators);
    for _ in 0..cfg.n_estimators {
        let rows = if cfg.bootstrap {
            (0..n).map(|_| rng.below(n)).collect()
        } else {
            all.clone()
        };
        trees.push(tree_train_on(ds, &rows, &cfg.tree, rng)?);
    }
    Ok(ForestModel {
        n_estimators: cfg.n_estimators,
        trees,
    })
}
