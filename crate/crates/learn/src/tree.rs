//! CART-style binary classification trees with Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct values;
//! rows with `x[feature] <= threshold` go left. Ties between equally good
//! splits keep the first one found (features in ascending order).

use deepfuse_core::{Dataset, SeededRng};
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::Classifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; `None` examines all.
    pub max_features: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 8,
            min_samples_split: 2,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        /// Fraction of deepfake rows that reached the leaf.
        value: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

impl TreeModel {
    pub fn leaf_value(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value, .. } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Children point forward, every node is reachable exactly once.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LearnError::Model(format!("tree: {m}")));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[0] = true;
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Split { feature, threshold, left, right } => {
                    if *feature >= self.n_features || !threshold.is_finite() {
                        return bad(format!("node {i} splits on feature {feature}"));
                    }
                    for &c in [left, right] {
                        if c <= i || c >= self.nodes.len() || seen[c] {
                            return bad(format!("node {i} has invalid child {c}"));
                        }
                        seen[c] = true;
                    }
                }
                Node::Leaf { value, .. } => {
                    if !(0.0..=1.0).contains(value) {
                        return bad(format!("leaf {i} value {value}"));
                    }
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            bad("unreachable nodes".into())
        }
    }
}

impl Classifier for TreeModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.leaf_value(x)
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: Vec<&'a [f64]>,
    y: Vec<bool>,
    cfg: &'a TreeConfig,
    n_features: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn best_split(&self, idx: &[usize], rng: &mut SeededRng) -> Option<(usize, f64)> {
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let parent = gini(pos, n);
        let mut features: Vec<usize> = match self.cfg.max_features {
            Some(m) if m < self.n_features => rng.sample_indices(self.n_features, m.max(1)),
            _ => (0..self.n_features).collect(),
        };
        features.sort_unstable();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        for f in features {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left_pos = 0;
            for k in 1..n {
                if self.y[sorted[k - 1]] {
                    left_pos += 1;
                }
                let (a, b) = (self.x[sorted[k - 1]][f], self.x[sorted[k]][f]);
                if a == b {
                    continue;
                }
                let impurity = (k as f64 * gini(left_pos, k) + (n - k) as f64 * gini(pos - left_pos, n - k)) / n as f64;
                if impurity < parent - 1e-12 && best.is_none_or(|(bi, _, _)| impurity < bi) {
                    let mid = a + (b - a) / 2.0;
                    best = Some((impurity, f, if mid < b { mid } else { a }));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut SeededRng) -> usize {
        let id = self.nodes.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let leaf = Node::Leaf {
            value: pos as f64 / idx.len() as f64,
            samples: idx.len(),
        };
        self.nodes.push(leaf);
        if depth >= self.cfg.max_depth || idx.len() < self.cfg.min_samples_split.max(2) || pos == 0 || pos == idx.len() {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&idx, rng) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1, rng);
        let right = self.grow(r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Trains on the given row indices (repeats allowed, as in a bootstrap sample).
pub fn tree_train_on(ds: &Dataset, rows: &[usize], cfg: &TreeConfig, rng: &mut SeededRng) -> Result<TreeModel> {
    if rows.is_empty() {
        return Err(LearnError::Data("empty training set".into()));
    }
    let labels = ds.labels()?;
    let all = ds.rows();
    let mut b = Builder {
        x: rows.iter().map(|&i| all[i].features.as_slice()).collect(),
        y: rows.iter().map(|&i| labels[i].as_u8() == 1).collect(),
        cfg,
        n_features: ds.n_features(),
        nodes: Vec::new(),
    };
    b.grow((0..rows.len()).collect(), 0, rng);
    Ok(TreeModel {
        n_features: ds.n_features(),
        nodes: b.nodes,
    })
}

pub fn tree_train(ds: &Dataset, cfg: &TreeConfig, rng: &mut SeededRng) -> Result<TreeModel> {
    tree_train_on(ds, &(0..ds.len()).collect::<Vec<_>>(), cfg, rng)
}
