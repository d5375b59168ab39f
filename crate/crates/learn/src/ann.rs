//! Feed-forward network for the 13-value video features.
//!
//! Unit `j` of layer `l` computes `σ(Σᵢ w_ij·a_i + b_j)` with rectifier
//! hidden units and a logistic output. Inputs are z-scored with statistics
//! fitted on the training set and stored in the model.

use deepfuse_core::{Dataset, Label, SeededRng};
use serde::{Deserialize, Serialize};

use crate::dense::DenseLayer;
use crate::error::{LearnError, Result};
use crate::history::EpochRecord;
use crate::nn::{bce_loss, relu, sigmoid, Momentum};
use crate::norm::NormStats;
use crate::Classifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for AnnConfig {
    fn default() -> Self {
        AnnConfig {
            hidden: vec![64, 32],
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            epochs: 200,
        }
    }
}

impl AnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.contains(&0) || self.batch_size == 0 || self.epochs == 0 {
            return Err(LearnError::Config("layer widths, batch size and epochs must be positive".into()));
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return Err(LearnError::Config(format!(
                "learning rate {} / momentum {} out of range",
                self.learning_rate, self.momentum
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnModel {
    pub layer_dims: Vec<usize>,
    pub layers: Vec<DenseLayer>,
    pub norm: NormStats,
}

impl AnnModel {
    /// Randomly initialised network with identity normalization.
    pub fn new(layer_dims: &[usize], rng: &mut SeededRng) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.contains(&0) || *layer_dims.last().unwrap() != 1 {
            return Err(LearnError::Config(format!("invalid layer dims {layer_dims:?}")));
        }
        let last = layer_dims.len() - 2;
        let layers = layer_dims
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                if l == last {
                    DenseLayer::xavier_uniform(w[0], w[1], rng)
                } else {
                    DenseLayer::he_uniform(w[0], w[1], rng)
                }
            })
            .collect();
        Ok(AnnModel {
            layer_dims: layer_dims.to_vec(),
            layers,
            norm: NormStats::identity(layer_dims[0]),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.layer_dims.len() >= 2
            && self.layers.len() == self.layer_dims.len() - 1
            && self.layer_dims.last() == Some(&1)
            && self.layers.iter().zip(self.layer_dims.windows(2)).all(|(l, w)| {
                l.inputs == w[0] && l.outputs == w[1] && l.is_consistent()
            })
            && self.norm.mean.len() == self.layer_dims[0]
            && self.norm.std.len() == self.layer_dims[0]
            && self.norm.std.iter().all(|&s| s > 0.0);
        if ok {
            Ok(())
        } else {
            Err(LearnError::Model(format!(
                "network dimensions inconsistent with layer_dims {:?}",
                self.layer_dims
            )))
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::n_params).sum()
    }

    /// All weights and biases, layer by layer (weights before biases).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            l.write_params(&mut out);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut at = 0;
        for l in &mut self.layers {
            at += l.read_params(&params[at..]);
        }
    }

    /// Activations of every layer for an already-normalized input; the last
    /// entry holds the output probability.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.forward(acts.last().unwrap(), &mut z);
            let f = if l == last { sigmoid } else { relu };
            acts.push(z.into_iter().map(f).collect());
        }
        acts
    }

    pub fn forward_normalized(&self, x: &[f64]) -> f64 {
        self.activations(x).last().unwrap()[0]
    }

    /// Mean cross-entropy over the batch and its gradient with respect to
    /// `params()`. Inputs must already be normalized.
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let offsets: Vec<usize> = self
            .layers
            .iter()
            .scan(0, |acc, l| {
                let start = *acc;
                *acc += l.n_params();
                Some(start)
            })
            .collect();
        let mut grad = vec![0.0; self.n_params()];
        let mut preds = Vec::with_capacity(xs.len());
        let scale = 1.0 / xs.len() as f64;
        let mut dz = Vec::new();
        let mut da = Vec::new();
        for (x, &y) in xs.iter().zip(ys) {
            let acts = self.activations(x);
            let p = acts.last().unwrap()[0];
            preds.push(p);
            dz.clear();
            dz.push((p - y) * scale);
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let slot = &mut grad[offsets[l]..offsets[l] + layer.n_params()];
                if l == 0 {
                    layer.backward(&acts[0], &dz, slot, None);
                } else {
                    layer.backward(&acts[l], &dz, slot, Some(&mut da));
                    // rectifier derivative, from the stored activation
                    dz.clear();
                    dz.extend(da.iter().zip(&acts[l]).map(|(d, a)| if *a > 0.0 { *d } else { 0.0 }));
                }
            }
        }
        let loss = bce_loss(ys, &preds).unwrap_or(f64::NAN);
        (loss, grad)
    }
}

impl Classifier for AnnModel {
    fn n_features(&self) -> usize {
        self.n_inputs()
    }

    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.forward_normalized(&self.norm.apply(x))
    }
}

/// Loss and accuracy of normalized rows.
fn evaluate(model: &AnnModel, xs: &[Vec<f64>], ys: &[f64]) -> (f64, f64) {
    let preds: Vec<f64> = xs.iter().map(|x| model.forward_normalized(x)).collect();
    let correct = preds
        .iter()
        .zip(ys)
        .filter(|(p, y)| Label::from_probability(**p).as_f64() == **y)
        .count();
    (bce_loss(ys, &preds).unwrap_or(f64::NAN), correct as f64 / ys.len() as f64)
}

pub fn ann_train(train: &Dataset, cfg: &AnnConfig, rng: &mut SeededRng) -> Result<(AnnModel, Vec<EpochRecord>)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(LearnError::Data("empty training set".into()));
    }
    let ys: Vec<f64> = train.labels()?.iter().map(|l| l.as_f64()).collect();
    let mut dims = vec![train.n_features()];
    dims.extend_from_slice(&cfg.hidden);
    dims.push(1);
    let mut model = AnnModel::new(&dims, rng)?;
    model.norm = NormStats::fit(train)?;
    let xs: Vec<Vec<f64>> = train.rows().iter().map(|r| model.norm.apply(&r.features)).collect();

    let mut params = model.params();
    let mut opt = Momentum::new(params.len(), cfg.learning_rate, cfg.momentum);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let bx: Vec<&[f64]> = batch.iter().map(|&i| xs[i].as_slice()).collect();
            let by: Vec<f64> = batch.iter().map(|&i| ys[i]).collect();
            let (_, grad) = model.loss_and_gradient(&bx, &by);
            opt.step(&mut params, &grad);
            model.set_params(&params);
        }
        let (loss, accuracy) = evaluate(&model, &xs, &ys);
        if !loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(LearnError::Diverged { epoch, loss });
        }
        log::debug!("ann epoch {epoch}: loss {loss:.6} accuracy {accuracy:.4}");
        history.push(EpochRecord { epoch, loss, accuracy });
    }
    Ok((model, history))
}
