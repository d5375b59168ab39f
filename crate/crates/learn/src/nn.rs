//! Activations, loss and the momentum update shared by the networks.

use crate::error::{LearnError, Result};

pub const BCE_EPS: f64 = 1e-12;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn relu(z: f64) -> f64 {
    z.max(0.0)
}

pub fn bce_loss(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    if y.len() != y_hat.len() || y.is_empty() {
        return Err(LearnError::Shape(format!("{} labels vs {} predictions", y.len(), y_hat.len())));
    }
    let sum: f64 = y
        .iter()
        .zip(y_hat)
        .map(|(&t, &p)| {
            let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
            t * p.ln() + (1.0 - t) * (1.0 - p).ln()
        })
        .sum();
    Ok(-sum / y.len() as f64)
}

/// Gradient descent with classical momentum on a flat parameter vector.
#[derive(Debug, Clone)]
pub struct Momentum {
    pub learning_rate: f64,
    pub momentum: f64,
    velocity: Vec<f64>,
}

impl Momentum {
    pub fn new(n_params: usize, learning_rate: f64, momentum: f64) -> Self {
        Momentum {
            learning_rate,
            momentum,
            velocity: vec![0.0; n_params],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        for ((p, v), g) in params.iter_mut().zip(&mut self.velocity).zip(grad) {
            *v = self.momentum * *v - self.learning_rate * g;
            *p += *v;
        }
    }
}

/// Central-difference relative error `|a − n| / max(|a|, |n|)`, zero when both vanish.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale == 0.0 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}
