//! Black-box classifier abstraction and the builtin softmax-regression model.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::image::{resize_bilinear, LabeledDataset, RgbImage};
use crate::rng::CounterRng;

/// Side length of the builtin model's downsampled input.
pub const BUILTIN_SIDE: usize = 16;
/// Builtin feature dimension: 16 x 16 pixels x 3 channels.
pub const BUILTIN_DIM: usize = BUILTIN_SIDE * BUILTIN_SIDE * 3;

const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// A validated probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities(Vec<f64>);

impl ClassProbabilities {
    /// Accepts entries in `[0, 1]` summing to 1 within 1e-6.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("probability vector is empty"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("probability outside [0, 1]"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(invalid(alloc::format!("probabilities sum to {sum}")));
        }
        Ok(ClassProbabilities(probs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn class_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, class: usize) -> f64 {
        self.0[class]
    }

    /// Index of the largest probability; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Max-subtracted exponential normalization.
pub fn softmax(logits: &[f64]) -> ClassProbabilities {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| libm::exp(z - max)).collect();
    let total: f64 = exps.iter().sum();
    ClassProbabilities(exps.into_iter().map(|e| e / total).collect())
}

/// Anything that maps images to class probabilities.
///
/// Implementations must be deterministic for a fixed model, and a batch
/// either succeeds entirely or fails.
pub trait Predictor: Sync {
    fn class_count(&self) -> usize;

    fn class_names(&self) -> &[String];

    fn predict_batch(&self, images: &[RgbImage]) -> Result<Vec<ClassProbabilities>>;

    fn predict(&self, image: &RgbImage) -> Result<ClassProbabilities> {
        let mut out = self.predict_batch(core::slice::from_ref(image))?;
        out.pop()
            .ok_or_else(|| Error::ExternalPredictorFailure("empty response for a single image".into()))
    }
}

/// Softmax regression over 16 x 16 downsampled pixels scaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinModel {
    /// Row-major `class_count x feature_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub feature_dim: usize,
    pub class_names: Vec<String>,
}

impl BuiltinModel {
    pub fn zeros(class_names: Vec<String>) -> Self {
        let c = class_names.len();
        BuiltinModel { weights: vec![0.0; c * BUILTIN_DIM], bias: vec![0.0; c], feature_dim: BUILTIN_DIM, class_names }
    }

    pub fn from_parts(weights: Vec<f64>, bias: Vec<f64>, feature_dim: usize, class_names: Vec<String>) -> Result<Self> {
        let c = class_names.len();
        if c == 0 {
            return Err(invalid("model needs at least one class"));
        }
        if feature_dim != BUILTIN_DIM {
            return Err(invalid(alloc::format!("builtin feature dim must be {BUILTIN_DIM}, got {feature_dim}")));
        }
        if weights.len() != c * feature_dim || bias.len() != c {
            return Err(Error::DimensionMismatch("weight/bias sizes disagree with class count".into()));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(invalid("model parameters must be finite"));
        }
        Ok(BuiltinModel { weights, bias, feature_dim, class_names })
    }

    pub fn class_count(&self) -> usize {
        self.bias.len()
    }

    pub fn logits(&self, features: &[f64]) -> Vec<f64> {
        self.bias
            .iter()
            .enumerate()
            .map(|(c, b)| {
                let row = &self.weights[c * self.feature_dim..(c + 1) * self.feature_dim];
                b + row.iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
            })
            .collect()
    }

    pub fn predict_image(&self, image: &RgbImage) -> ClassProbabilities {
        softmax(&self.logits(&builtin_features(image)))
    }
}

impl Predictor for BuiltinModel {
    fn class_count(&self) -> usize {
        self.bias.len()
    }

    fn class_names(&self) -> &[String] {
        &self.class_names
    }

    fn predict_batch(&self, images: &[RgbImage]) -> Result<Vec<ClassProbabilities>> {
        Ok(images.iter().map(|img| self.predict_image(img)).collect())
    }
}

/// Bilinear resize to 16 x 16, then `pixel / 255`, row-major RGB.
pub fn builtin_features(image: &RgbImage) -> Vec<f64> {
    let small = resize_bilinear(image, BUILTIN_SIDE, BUILTIN_SIDE).expect("16x16 is a valid target");
    small.pixels().iter().flatten().map(|&v| v as f64 / 255.0).collect()
}

/// Mean cross-entropy of softmax regression and its gradient.
///
/// `features` is row-major `n x dim`; returns `(loss, grad_weights, grad_bias)`
/// with `grad_weights` row-major `classes x dim`.
pub fn softmax_cross_entropy(
    weights: &[f64],
    bias: &[f64],
    dim: usize,
    features: &[f64],
    labels: &[usize],
) -> (f64, Vec<f64>, Vec<f64>) {
    let classes = bias.len();
    let n = labels.len();
    let mut loss = 0.0;
    let mut gw = vec![0.0; classes * dim];
    let mut gb = vec![0.0; classes];
    let mut logits = vec![0.0; classes];
    for (i, &label) in labels.iter().enumerate() {
        let x = &features[i * dim..(i + 1) * dim];
        for c in 0..classes {
            let row = &weights[c * dim..(c + 1) * dim];
            logits[c] = bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + libm::log(logits.iter().map(|&z| libm::exp(z - max)).sum::<f64>());
        loss += log_z - logits[label];
        for c in 0..classes {
            let p = libm::exp(logits[c] - log_z);
            let delta = p - if c == label { 1.0 } else { 0.0 };
            gb[c] += delta;
            let grow = &mut gw[c * dim..(c + 1) * dim];
            for (g, v) in grow.iter_mut().zip(x) {
                *g += delta * v;
            }
        }
    }
    let inv = 1.0 / n.max(1) as f64;
    gw.iter_mut().for_each(|g| *g *= inv);
    gb.iter_mut().for_each(|g| *g *= inv);
    (loss * inv, gw, gb)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub batch_size: usize,
}

impl TrainConfig {
    pub fn new(epochs: usize, learning_rate: f64, seed: u64) -> Self {
        TrainConfig { epochs, learning_rate, seed, batch_size: 32 }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: BuiltinModel,
    /// Mean full-dataset loss after each epoch.
    pub loss_trace: Vec<f64>,
}

/// Mini-batch SGD from zero weights; epoch `e` shuffles with stream `e` of `seed`.
pub fn train_builtin(dataset: &LabeledDataset, config: &TrainConfig) -> Result<TrainOutcome> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.epochs < 1 {
        return Err(invalid("epochs must be >= 1"));
    }
    if config.batch_size < 1 || !(config.learning_rate > 0.0) {
        return Err(invalid("batch size and learning rate must be positive"));
    }
    let dim = BUILTIN_DIM;
    let features: Vec<f64> = dataset.images.iter().flat_map(builtin_features).collect();
    let mut model = BuiltinModel::zeros(dataset.category_names.clone());
    let n = dataset.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut batch_x = Vec::with_capacity(config.batch_size * dim);
    let mut batch_y = Vec::with_capacity(config.batch_size);
    let mut loss_trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut rng = CounterRng::new(config.seed, epoch as u64);
        for i in (1..n).rev() {
            let j = rng.below(i + 1);
            order.swap(i, j);
        }
        for chunk in order.chunks(config.batch_size) {
            batch_x.clear();
            batch_y.clear();
            for &i in chunk {
                batch_x.extend_from_slice(&features[i * dim..(i + 1) * dim]);
                batch_y.push(dataset.labels[i]);
            }
            let (_, gw, gb) = softmax_cross_entropy(&model.weights, &model.bias, dim, &batch_x, &batch_y);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= config.learning_rate * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&gb) {
                *b -= config.learning_rate * g;
            }
        }
        let (loss, _, _) = softmax_cross_entropy(&model.weights, &model.bias, dim, &features, &dataset.labels);
        loss_trace.push(loss);
    }
    Ok(TrainOutcome { model, loss_trace })
}
