//! Small convolutional network over mel spectrograms.
//!
//! Each block is a valid 3×3 convolution with rectifier activation followed
//! by 2×2 max pooling (stride 2, odd edges dropped). The flattened maps feed
//! a rectifier dense layer, inverted dropout (training only) and a logistic
//! output unit. Tensors are channel-major `[c][y][x]`.

use deepfuse_audio::Matrix;
use deepfuse_core::{Label, SeededRng};
use serde::{Deserialize, Serialize};

use crate::dense::DenseLayer;
use crate::error::{LearnError, Result};
use crate::history::EpochRecord;
use crate::nn::{bce_loss, relu, sigmoid, Momentum};

pub const KERNEL: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CnnConfig {
    pub input_rows: usize,
    pub input_cols: usize,
    pub conv_filters: Vec<usize>,
    pub dense: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            input_rows: 128,
            input_cols: 128,
            conv_filters: vec![8, 16],
            dense: 64,
            dropout: 0.3,
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 16,
            epochs: 10,
        }
    }
}

impl CnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.conv_filters.is_empty() || self.conv_filters.contains(&0) || self.dense == 0 {
            return Err(LearnError::Config("conv filters and dense width must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(LearnError::Config(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if self.batch_size == 0 || self.epochs == 0 || !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return Err(LearnError::Config("invalid optimizer settings".into()));
        }
        block_shapes(self.input_rows, self.input_cols, &self.conv_filters).map(|_| ())
    }
}

/// `(channels, rows, cols)` after each conv+pool block.
fn block_shapes(rows: usize, cols: usize, filters: &[usize]) -> Result<Vec<(usize, usize, usize)>> {
    let (mut h, mut w) = (rows, cols);
    let mut shapes = Vec::new();
    for &f in filters {
        if h < KERNEL + 1 || w < KERNEL + 1 {
            return Err(LearnError::Config(format!(
                "input {rows}x{cols} too small for {} conv blocks",
                filters.len()
            )));
        }
        h = (h - KERNEL + 1) / 2;
        w = (w - KERNEL + 1) / 2;
        shapes.push((f, h, w));
    }
    Ok(shapes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvLayer {
    pub in_channels: usize,
    pub out_channels: usize,
    /// `[out][in][ky][kx]`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl ConvLayer {
    fn he_uniform(in_channels: usize, out_channels: usize, rng: &mut SeededRng) -> Self {
        let limit = (6.0 / (in_channels * KERNEL * KERNEL) as f64).sqrt();
        ConvLayer {
            in_channels,
            out_channels,
            weights: (0..out_channels * in_channels * KERNEL * KERNEL)
                .map(|_| rng.uniform_range(-limit, limit))
                .collect(),
            biases: vec![0.0; out_channels],
        }
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    fn kernel(&self, o: usize, i: usize) -> &[f64] {
        let k = KERNEL * KERNEL;
        let start = (o * self.in_channels + i) * k;
        &self.weights[start..start + k]
    }

    /// Valid cross-correlation of `[in][h][w]` → `[out][h-2][w-2]`.
    pub fn forward(&self, input: &[f64], h: usize, w: usize) -> Vec<f64> {
        let (oh, ow) = (h - KERNEL + 1, w - KERNEL + 1);
        let mut out = vec![0.0; self.out_channels * oh * ow];
        for o in 0..self.out_channels {
            let dst = &mut out[o * oh * ow..(o + 1) * oh * ow];
            dst.fill(self.biases[o]);
            for i in 0..self.in_channels {
                let src = &input[i * h * w..(i + 1) * h * w];
                let k = self.kernel(o, i);
                for ky in 0..KERNEL {
                    for kx in 0..KERNEL {
                        let wk = k[ky * KERNEL + kx];
                        for y in 0..oh {
                            let s = &src[(y + ky) * w + kx..(y + ky) * w + kx + ow];
                            for (d, v) in dst[y * ow..(y + 1) * ow].iter_mut().zip(s) {
                                *d += wk * v;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Accumulates parameter gradients for `dz` (`[out][oh][ow]`) and returns
    /// the input gradient when requested.
    fn backward(&self, input: &[f64], h: usize, w: usize, dz: &[f64], grad: &mut [f64], want_dx: bool) -> Option<Vec<f64>> {
        let (oh, ow) = (h - KERNEL + 1, w - KERNEL + 1);
        let kk = KERNEL * KERNEL;
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        let mut dx = want_dx.then(|| vec![0.0; self.in_channels * h * w]);
        for o in 0..self.out_channels {
            let d = &dz[o * oh * ow..(o + 1) * oh * ow];
            gb[o] += d.iter().sum::<f64>();
            for i in 0..self.in_channels {
                let src = &input[i * h * w..(i + 1) * h * w];
                let base = (o * self.in_channels + i) * kk;
                for ky in 0..KERNEL {
                    for kx in 0..KERNEL {
                        let mut acc = 0.0;
                        for y in 0..oh {
                            let s = &src[(y + ky) * w + kx..(y + ky) * w + kx + ow];
                            acc += d[y * ow..(y + 1) * ow].iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
                        }
                        gw[base + ky * KERNEL + kx] += acc;
                        if let Some(dx) = dx.as_mut() {
                            let wk = self.weights[base + ky * KERNEL + kx];
                            let dst = &mut dx[i * h * w..(i + 1) * h * w];
                            for y in 0..oh {
                                let row = &mut dst[(y + ky) * w + kx..(y + ky) * w + kx + ow];
                                for (r, g) in row.iter_mut().zip(&d[y * ow..(y + 1) * ow]) {
                                    *r += wk * g;
                                }
                            }
                        }
                    }
                }
            }
        }
        dx
    }
}

/// 2×2 max pooling; returns pooled values and the flat input index of each maximum.
fn max_pool(input: &[f64], c: usize, h: usize, w: usize) -> (Vec<f64>, Vec<usize>) {
    let (ph, pw) = (h / 2, w / 2);
    let mut out = Vec::with_capacity(c * ph * pw);
    let mut arg = Vec::with_capacity(c * ph * pw);
    for ch in 0..c {
        for y in 0..ph {
            for x in 0..pw {
                let mut best = ch * h * w + 2 * y * w + 2 * x;
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let idx = ch * h * w + (2 * y + dy) * w + 2 * x + dx;
                    if input[idx] > input[best] {
                        best = idx;
                    }
                }
                out.push(input[best]);
                arg.push(best);
            }
        }
    }
    (out, arg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnModel {
    pub input_rows: usize,
    pub input_cols: usize,
    pub convs: Vec<ConvLayer>,
    pub hidden: DenseLayer,
    pub output: DenseLayer,
    pub dropout: f64,
}

struct Trace {
    /// Input of every conv block, then the flattened features.
    inputs: Vec<Vec<f64>>,
    /// Rectified conv outputs before pooling.
    conv_out: Vec<Vec<f64>>,
    pool_arg: Vec<Vec<usize>>,
    hidden: Vec<f64>,
    mask: Vec<f64>,
    prob: f64,
}

impl CnnModel {
    pub fn new(cfg: &CnnConfig, rng: &mut SeededRng) -> Result<Self> {
        cfg.validate()?;
        let shapes = block_shapes(cfg.input_rows, cfg.input_cols, &cfg.conv_filters)?;
        let mut in_ch = 1;
        let mut convs = Vec::new();
        for &f in &cfg.conv_filters {
            convs.push(ConvLayer::he_uniform(in_ch, f, rng));
            in_ch = f;
        }
        let (c, h, w) = *shapes.last().unwrap();
        Ok(CnnModel {
            input_rows: cfg.input_rows,
            input_cols: cfg.input_cols,
            convs,
            hidden: DenseLayer::he_uniform(c * h * w, cfg.dense, rng),
            output: DenseLayer::xavier_uniform(cfg.dense, 1, rng),
            dropout: cfg.dropout,
        })
    }

    fn filters(&self) -> Vec<usize> {
        self.convs.iter().map(|c| c.out_channels).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LearnError::Model(format!("cnn: {m}")));
        let shapes = block_shapes(self.input_rows, self.input_cols, &self.filters())?;
        let mut in_ch = 1;
        for c in &self.convs {
            if c.in_channels != in_ch
                || c.weights.len() != c.out_channels * c.in_channels * KERNEL * KERNEL
                || c.biases.len() != c.out_channels
            {
                return bad("convolution shapes do not chain");
            }
            in_ch = c.out_channels;
        }
        let (c, h, w) = *shapes.last().unwrap();
        if self.hidden.inputs != c * h * w || !self.hidden.is_consistent() {
            return bad("dense layer does not match flattened size");
        }
        if self.output.inputs != self.hidden.outputs || self.output.outputs != 1 || !self.output.is_consistent() {
            return bad("output layer shape");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout outside [0, 1)");
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.convs.iter().map(ConvLayer::n_params).sum::<usize>() + self.hidden.n_params() + self.output.n_params()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for c in &self.convs {
            out.extend_from_slice(&c.weights);
            out.extend_from_slice(&c.biases);
        }
        self.hidden.write_params(&mut out);
        self.output.write_params(&mut out);
        out
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let mut at = 0;
        for c in &mut self.convs {
            let nw = c.weights.len();
            c.weights.copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = c.biases.len();
            c.biases.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
        at += self.hidden.read_params(&p[at..]);
        self.output.read_params(&p[at..]);
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_rows * self.input_cols {
            return Err(LearnError::Shape(format!(
                "input has {} values, expected {}x{}",
                input.len(),
                self.input_rows,
                self.input_cols
            )));
        }
        Ok(())
    }

    fn run(&self, input: &[f64], dropout: Option<&mut SeededRng>) -> Trace {
        let (mut h, mut w) = (self.input_rows, self.input_cols);
        let mut inputs = vec![input.to_vec()];
        let mut conv_out = Vec::new();
        let mut pool_arg = Vec::new();
        for conv in &self.convs {
            let z: Vec<f64> = conv.forward(inputs.last().unwrap(), h, w).into_iter().map(relu).collect();
            let (oh, ow) = (h - KERNEL + 1, w - KERNEL + 1);
            let (pooled, arg) = max_pool(&z, conv.out_channels, oh, ow);
            conv_out.push(z);
            pool_arg.push(arg);
            inputs.push(pooled);
            h = oh / 2;
            w = ow / 2;
        }
        let mut hidden = Vec::new();
        self.hidden.forward(inputs.last().unwrap(), &mut hidden);
        hidden.iter_mut().for_each(|v| *v = relu(*v));
        let mask: Vec<f64> = match dropout {
            Some(rng) if self.dropout > 0.0 => {
                let keep = 1.0 - self.dropout;
                (0..hidden.len())
                    .map(|_| if rng.uniform() < keep { 1.0 / keep } else { 0.0 })
                    .collect()
            }
            _ => vec![1.0; hidden.len()],
        };
        let dropped: Vec<f64> = hidden.iter().zip(&mask).map(|(a, m)| a * m).collect();
        let mut z = Vec::new();
        self.output.forward(&dropped, &mut z);
        Trace {
            inputs,
            conv_out,
            pool_arg,
            hidden,
            mask,
            prob: sigmoid(z[0]),
        }
    }

    /// Inference probability (dropout off).
    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        self.check_input(input)?;
        Ok(self.run(input, None).prob)
    }

    pub fn predict(&self, input: &[f64]) -> Result<Label> {
        self.forward(input).map(Label::from_probability)
    }

    fn accumulate(&self, t: &Trace, y: f64, scale: f64, grad: &mut [f64]) {
        let n_out = self.output.n_params();
        let n_hidden = self.hidden.n_params();
        let conv_total: usize = self.convs.iter().map(ConvLayer::n_params).sum();
        let dropped: Vec<f64> = t.hidden.iter().zip(&t.mask).map(|(a, m)| a * m).collect();
        let dz_out = [(t.prob - y) * scale];
        let mut d_dropped = Vec::new();
        self.output.backward(
            &dropped,
            &dz_out,
            &mut grad[conv_total + n_hidden..conv_total + n_hidden + n_out],
            Some(&mut d_dropped),
        );
        let dz_hidden: Vec<f64> = d_dropped
            .iter()
            .zip(&t.mask)
            .zip(&t.hidden)
            .map(|((d, m), a)| if *a > 0.0 { d * m } else { 0.0 })
            .collect();
        let mut d_flat = Vec::new();
        self.hidden.backward(
            t.inputs.last().unwrap(),
            &dz_hidden,
            &mut grad[conv_total..conv_total + n_hidden],
            Some(&mut d_flat),
        );

        let mut offsets = Vec::new();
        let mut acc = 0;
        for c in &self.convs {
            offsets.push(acc);
            acc += c.n_params();
        }
        let mut dims = vec![(self.input_rows, self.input_cols)];
        for _ in &self.convs {
            let (h, w) = *dims.last().unwrap();
            dims.push(((h - KERNEL + 1) / 2, (w - KERNEL + 1) / 2));
        }
        let mut d_pooled = d_flat;
        for (l, conv) in self.convs.iter().enumerate().rev() {
            let (h, w) = dims[l];
            let z = &t.conv_out[l];
            let mut dz = vec![0.0; z.len()];
            for (g, &idx) in d_pooled.iter().zip(&t.pool_arg[l]) {
                if z[idx] > 0.0 {
                    dz[idx] += g;
                }
            }
            let slot = &mut grad[offsets[l]..offsets[l] + conv.n_params()];
            match conv.backward(&t.inputs[l], h, w, &dz, slot, l > 0) {
                Some(dx) => d_pooled = dx,
                None => break,
            }
        }
    }

    /// Mean cross-entropy and its gradient with respect to `params()`,
    /// evaluated with dropout disabled.
    pub fn loss_and_gradient(&self, inputs: &[&[f64]], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; self.n_params()];
        let mut preds = Vec::with_capacity(inputs.len());
        for (x, &y) in inputs.iter().zip(ys) {
            self.check_input(x)?;
            let t = self.run(x, None);
            preds.push(t.prob);
            self.accumulate(&t, y, 1.0 / inputs.len() as f64, &mut grad);
        }
        Ok((bce_loss(ys, &preds)?, grad))
    }
}

/// Scales dB values from `[floor_db, 0]` to `[0, 1]` and center-crops or
/// zero-pads (at the floor) the time axis to `cols` frames.
pub fn prepare_input(db: &Matrix, floor_db: f64, rows: usize, cols: usize) -> Result<Vec<f64>> {
    if db.rows != rows {
        return Err(LearnError::Shape(format!("spectrogram has {} bands, expected {rows}", db.rows)));
    }
    Ok(db
        .fit_cols_centered(cols, floor_db)
        .data
        .into_iter()
        .map(|v| ((v - floor_db) / -floor_db).clamp(0.0, 1.0))
        .collect())
}

pub fn cnn_train(
    inputs: &[Vec<f64>],
    labels: &[Label],
    cfg: &CnnConfig,
    rng: &mut SeededRng,
) -> Result<(CnnModel, Vec<EpochRecord>)> {
    if inputs.len() != labels.len() || inputs.is_empty() {
        return Err(LearnError::Data(format!("{} inputs vs {} labels", inputs.len(), labels.len())));
    }
    let mut model = CnnModel::new(cfg, rng)?;
    for x in inputs {
        model.check_input(x)?;
    }
    let ys: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
    let mut params = model.params();
    let mut opt = Momentum::new(params.len(), cfg.learning_rate, cfg.momentum);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = Vec::new();
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut preds = vec![0.0; inputs.len()];
        for batch in order.chunks(cfg.batch_size) {
            let mut grad = vec![0.0; params.len()];
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let t = model.run(&inputs[i], Some(rng));
                preds[i] = t.prob;
                model.accumulate(&t, ys[i], scale, &mut grad);
            }
            opt.step(&mut params, &grad);
            model.set_params(&params);
        }
        // running training statistics, as seen during the epoch
        let loss = bce_loss(&ys, &preds)?;
        let accuracy = preds
            .iter()
            .zip(&ys)
            .filter(|(p, y)| Label::from_probability(**p).as_f64() == **y)
            .count() as f64
            / ys.len() as f64;
        if !loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(LearnError::Diverged { epoch, loss });
        }
        log::debug!("cnn epoch {epoch}: loss {loss:.6} accuracy {accuracy:.4}");
        history.push(EpochRecord { epoch, loss, accuracy });
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::relative_error;

    fn small_cfg() -> CnnConfig {
        CnnConfig {
            input_rows: 12,
            input_cols: 10,
            conv_filters: vec![2, 3],
            dense: 5,
            dropout: 0.3,
            ..CnnConfig::default()
        }
    }

    #[test]
    fn zero_parameters_give_half() {
        let mut m = CnnModel::new(&small_cfg(), &mut SeededRng::new(1)).unwrap();
        m.set_params(&vec![0.0; m.n_params()]);
        assert_eq!(m.forward(&vec![0.7; 120]).unwrap(), 0.5);
    }

    #[test]
    fn convolution_matches_sliding_window() {
        let mut rng = SeededRng::new(2);
        let conv = ConvLayer::he_uniform(1, 1, &mut rng);
        let x: Vec<f64> = (0..36).map(|_| rng.normal()).collect();
        let out = conv.forward(&x, 6, 6);
        for y in 0..4 {
            for xx in 0..4 {
                let mut s = conv.biases[0];
                for ky in 0..3 {
                    for kx in 0..3 {
                        s += conv.weights[ky * 3 + kx] * x[(y + ky) * 6 + xx + kx];
                    }
                }
                assert!((out[y * 4 + xx] - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shapes_chain_for_default_input() {
        let shapes = block_shapes(128, 128, &[8, 16]).unwrap();
        assert_eq!(shapes, vec![(8, 63, 63), (16, 30, 30)]);
        assert!(block_shapes(5, 5, &[2, 2]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = SeededRng::new(4);
        let mut m = CnnModel::new(&small_cfg(), &mut rng).unwrap();
        let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..120).map(|_| rng.uniform()).collect()).collect();
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let ys = [1.0, 0.0, 1.0];
        let (_, grad) = m.loss_and_gradient(&refs, &ys).unwrap();
        let base = m.params();
        let h = 1e-5;
        for k in rng.sample_indices(base.len(), 100) {
            let mut p = base.clone();
            p[k] += h;
            m.set_params(&p);
            let up = m.loss_and_gradient(&refs, &ys).unwrap().0;
            p[k] -= 2.0 * h;
            m.set_params(&p);
            let down = m.loss_and_gradient(&refs, &ys).unwrap().0;
            let numeric = (up - down) / (2.0 * h);
            assert!(relative_error(grad[k], numeric) < 1e-4, "param {k}: {} vs {numeric}", grad[k]);
        }
    }

    #[test]
    fn wrong_shape_rejected() {
        let m = CnnModel::new(&small_cfg(), &mut SeededRng::new(1)).unwrap();
        assert!(m.forward(&[0.0; 5]).is_err());
    }

    #[test]
    fn prepare_input_scales_and_fits() {
        let db = Matrix::from_vec(2, 3, vec![0.0, -40.0, -80.0, -20.0, -100.0, 0.0]).unwrap();
        let x = prepare_input(&db, -80.0, 2, 5).unwrap();
        assert_eq!(x, vec![0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.75, 0.0, 1.0, 0.0]);
        assert!(prepare_input(&db, -80.0, 3, 5).is_err());
    }
}
