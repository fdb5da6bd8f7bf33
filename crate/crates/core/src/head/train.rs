use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::data::LabeledEmbeddingSet;
use super::mask::MaskPlan;

/// Hyperparameters of the head trainer. Mini-batch SGD with heavy-ball momentum
/// (`v = momentum·v + g; w -= lr·v`), zero-initialised weights and bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 128,
            epochs: 30,
            seed: 0,
        }
    }
}

/// Multinomial logistic head over the full embedding width. Columns masked by
/// `plan` hold exactly zero weight and are never read at prediction time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearHead {
    pub n_classes: usize,
    pub dim: usize,
    /// Row-major `n_classes x dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub plan: MaskPlan,
    pub config: TrainConfig,
    /// Mean mini-batch loss per epoch, each batch measured before its update.
    pub loss_history: Vec<f64>,
}

impl LinearHead {
    pub fn zeros(n_classes: usize, plan: MaskPlan) -> Self {
        Self {
            n_classes,
            dim: plan.dim,
            weights: vec![0.0; n_classes * plan.dim],
            bias: vec![0.0; n_classes],
            plan,
            config: TrainConfig::default(),
            loss_history: Vec::new(),
        }
    }

    pub fn weight(&self, class: usize, j: usize) -> f64 {
        self.weights[class * self.dim + j]
    }

    /// Logits of one full-width embedding, reading kept coordinates only.
    pub fn logits(&self, x: &[f32]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let w = &self.weights[c * self.dim..(c + 1) * self.dim];
                self.plan
                    .kept
                    .iter()
                    .fold(self.bias[c], |acc, &j| acc + w[j] * x[j] as f64)
            })
            .collect()
    }

    /// Argmax of the logits, lowest class index on ties.
    pub fn predict(&self, x: &[f32]) -> usize {
        argmax(&self.logits(x))
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Mean softmax cross-entropy over `rows` and its gradient.
///
/// `inputs` is row-major with `dim` columns; `weights` is `n_classes x dim`.
/// Returns `(loss, d loss / d weights, d loss / d bias)`.
pub fn cross_entropy_gradient(
    weights: &[f64],
    bias: &[f64],
    inputs: &[f64],
    dim: usize,
    labels: &[u32],
    rows: &[usize],
) -> (f64, Vec<f64>, Vec<f64>) {
    let n_classes = bias.len();
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = vec![0.0; n_classes];
    let mut loss = 0.0;
    let mut probs = vec![0.0; n_classes];
    for &r in rows {
        let x = &inputs[r * dim..(r + 1) * dim];
        for c in 0..n_classes {
            let w = &weights[c * dim..(c + 1) * dim];
            probs[c] = bias[c] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        let max = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut norm = 0.0;
        for p in probs.iter_mut() {
            *p = (*p - max).exp();
            norm += *p;
        }
        let y = labels[r] as usize;
        loss += norm.ln() - (probs[y].ln());
        for (c, p) in probs.iter_mut().enumerate() {
            *p /= norm;
            let delta = *p - if c == y { 1.0 } else { 0.0 };
            grad_b[c] += delta;
            let g = &mut grad_w[c * dim..(c + 1) * dim];
            for (gj, xj) in g.iter_mut().zip(x) {
                *gj += delta * xj;
            }
        }
    }
    let scale = 1.0 / rows.len() as f64;
    grad_w.iter_mut().for_each(|g| *g *= scale);
    grad_b.iter_mut().for_each(|g| *g *= scale);
    (loss * scale, grad_w, grad_b)
}

/// Trains a head on the kept coordinates of `data`.
///
/// The optimisation runs on the column-restricted inputs; the result is
/// scattered back to full width with zero columns at masked positions.
pub fn train_head(data: &LabeledEmbeddingSet, plan: &MaskPlan, config: &TrainConfig) -> Result<LinearHead> {
    if plan.dim != data.dim() {
        return Err(Error::LengthMismatch {
            what: "mask plan width",
            expected: data.dim(),
            actual: plan.dim,
        });
    }
    if let Some(missing) = data.class_counts().iter().position(|&c| c == 0) {
        return Err(Error::DegenerateData(format!(
            "class {missing} has no training examples"
        )));
    }
    if config.batch_size == 0 {
        return Err(Error::OutOfRange {
            what: "batch_size",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let n = data.len();
    let n_classes = data.n_classes();
    let kept = &plan.kept;
    let k = kept.len();

    let mut inputs = Vec::with_capacity(n * k);
    for i in 0..n {
        let row = data.row(i);
        inputs.extend(kept.iter().map(|&j| row[j] as f64));
    }

    let mut w = vec![0.0; n_classes * k];
    let mut b = vec![0.0; n_classes];
    let mut vel_w = vec![0.0; w.len()];
    let mut vel_b = vec![0.0; n_classes];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(config.batch_size) {
            let (loss, gw, gb) = cross_entropy_gradient(&w, &b, &inputs, k, data.labels(), batch);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            epoch_loss += loss;
            batches += 1;
            for ((wi, vi), gi) in w.iter_mut().zip(vel_w.iter_mut()).zip(&gw) {
                *vi = config.momentum * *vi + gi;
                *wi -= config.learning_rate * *vi;
            }
            for ((bi, vi), gi) in b.iter_mut().zip(vel_b.iter_mut()).zip(&gb) {
                *vi = config.momentum * *vi + gi;
                *bi -= config.learning_rate * *vi;
            }
        }
        let mean = epoch_loss / batches as f64;
        if !mean.is_finite() || w.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        loss_history.push(mean);
    }

    let mut head = LinearHead::zeros(n_classes, plan.clone());
    for c in 0..n_classes {
        for (slot, &j) in kept.iter().enumerate() {
            head.weights[c * plan.dim + j] = w[c * k + slot];
        }
    }
    head.bias = b;
    head.config = config.clone();
    head.loss_history = loss_history;
    Ok(head)
}
