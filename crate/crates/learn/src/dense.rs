use deepfuse_core::SeededRng;
use serde::{Deserialize, Serialize};

/// Fully connected layer; `weights[j·inputs + i]` connects input `i` to unit `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseLayer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    /// Uniform in `±sqrt(6 / fan_in)`, zero biases.
    pub fn he_uniform(inputs: usize, outputs: usize, rng: &mut SeededRng) -> Self {
        let limit = (6.0 / inputs as f64).sqrt();
        let mut l = DenseLayer::zeros(inputs, outputs);
        for w in &mut l.weights {
            *w = rng.uniform_range(-limit, limit);
        }
        l
    }

    /// Uniform in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn xavier_uniform(inputs: usize, outputs: usize, rng: &mut SeededRng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let mut l = DenseLayer::zeros(inputs, outputs);
        for w in &mut l.weights {
            *w = rng.uniform_range(-limit, limit);
        }
        l
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.weights.len() == self.inputs * self.outputs && self.biases.len() == self.outputs
    }

    pub fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(j, b)| {
            let row = &self.weights[j * self.inputs..(j + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }

    /// Accumulates `dz ⊗ x` into `grad` (weights then biases) and, if asked,
    /// writes `Wᵀ·dz` into `dx`.
    pub fn backward(&self, x: &[f64], dz: &[f64], grad: &mut [f64], dx: Option<&mut Vec<f64>>) {
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        for (j, &d) in dz.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for (g, v) in gw[j * self.inputs..(j + 1) * self.inputs].iter_mut().zip(x) {
                *g += d * v;
            }
            gb[j] += d;
        }
        if let Some(dx) = dx {
            dx.clear();
            dx.resize(self.inputs, 0.0);
            for (j, &d) in dz.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for (o, w) in dx.iter_mut().zip(&self.weights[j * self.inputs..(j + 1) * self.inputs]) {
                    *o += d * w;
                }
            }
        }
    }

    pub fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.weights);
        out.extend_from_slice(&self.biases);
    }

    pub fn read_params(&mut self, src: &[f64]) -> usize {
        let nw = self.weights.len();
        self.weights.copy_from_slice(&src[..nw]);
        self.biases.copy_from_slice(&src[nw..nw + self.outputs]);
        nw + self.outputs
    }
}
