//! Feed-forward multi-class classifier trained on cluster labels.
//!
//! Rectifier hidden layers, softmax output, cross-entropy loss, Adam updates
//! and early stopping on validation loss. Training is single-threaded and
//! bit-reproducible for a fixed seed; a trained model is immutable and safe
//! to share across threads for prediction.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Probability floor inside the loss; masked inputs can saturate the softmax.
pub const PROB_FLOOR: f64 = 1e-12;

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden_sizes: Vec<usize>,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub early_stopping_patience: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_sizes: vec![50, 25, 10],
            max_epochs: 50,
            batch_size: 32,
            learning_rate: 1e-3,
            early_stopping_patience: 5,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(Error::Invalid("hidden_sizes must be nonempty and positive".into()));
        }
        if self.max_epochs == 0 || self.batch_size == 0 || self.early_stopping_patience == 0 {
            return Err(Error::Invalid(
                "max_epochs, batch_size and early_stopping_patience must be >= 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Invalid("learning_rate must be > 0".into()));
        }
        Ok(())
    }
}

/// One dense layer; weights are `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub inputs: usize,
    pub outputs: usize,
}

impl Layer {
    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.inputs + inp]
    }

    pub fn set_weight(&mut self, out: usize, inp: usize, v: f64) {
        self.weights[out * self.inputs + inp] = v;
    }

    fn forward(&self, x: &[f64], relu: bool) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.outputs);
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let mut z = self.biases[o];
            for (w, v) in row.iter().zip(x) {
                z += w * v;
            }
            out.push(if relu { z.max(0.0) } else { z });
        }
        out
    }
}

/// Per-layer gradients of the mean cross-entropy over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    version: u32,
    pub input_width: usize,
    pub n_classes: usize,
    layers: Vec<Layer>,
    pub config: MlpConfig,
    pub training_log: Vec<EpochStats>,
}

impl MlpModel {
    /// Fresh model with He-uniform weights and zero biases, seeded.
    pub fn init(input_width: usize, hidden_sizes: &[usize], n_classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::init_from_rng(input_width, hidden_sizes, n_classes, &mut rng)
    }

    fn init_from_rng(
        input_width: usize,
        hidden_sizes: &[usize],
        n_classes: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut sizes = vec![input_width];
        sizes.extend_from_slice(hidden_sizes);
        sizes.push(n_classes);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let limit = (6.0 / inputs.max(1) as f64).sqrt();
                let weights = (0..inputs * outputs)
                    .map(|_| rng.random_range(-limit..limit))
                    .collect();
                Layer {
                    weights,
                    biases: vec![0.0; outputs],
                    inputs,
                    outputs,
                }
            })
            .collect();
        MlpModel {
            version: MODEL_FORMAT_VERSION,
            input_width,
            n_classes,
            layers,
            config: MlpConfig::default(),
            training_log: Vec::new(),
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, l: usize) -> &Layer {
        &self.layers[l]
    }

    pub fn layer_mut(&mut self, l: usize) -> &mut Layer {
        &mut self.layers[l]
    }

    /// Zeroes every first-layer weight attached to input coordinate `col`,
    /// making the network output constant in that coordinate.
    pub fn zero_input_weights(&mut self, col: usize) {
        let first = &mut self.layers[0];
        for o in 0..first.outputs {
            first.set_weight(o, col, 0.0);
        }
    }

    /// Stable hash of shapes and weights; identifies the model in reports.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bits: u64| {
            h ^= bits;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        eat(self.input_width as u64);
        eat(self.n_classes as u64);
        for layer in &self.layers {
            eat(layer.inputs as u64);
            eat(layer.outputs as u64);
            for w in &layer.weights {
                eat(w.to_bits());
            }
            for b in &layer.biases {
                eat(b.to_bits());
            }
        }
        format!("{h:016x}")
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        let last = self.layers.len() - 1;
        let mut a = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            a = layer.forward(&a, l != last);
        }
        a
    }

    /// Softmax class probabilities for one input row (with intercept).
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_width {
            return Err(Error::DimensionMismatch {
                expected: self.input_width,
                got: x.len(),
            });
        }
        Ok(softmax(&self.logits(x)))
    }

    /// Cross-entropy of one row: -ln p(y), probability floored at 1e-12.
    pub fn loss(&self, x: &[f64], y: usize) -> Result<f64> {
        if y == 0 || y > self.n_classes {
            return Err(Error::BadLabel {
                label: y,
                n_classes: self.n_classes,
            });
        }
        let probs = self.predict_proba(x)?;
        Ok(-probs[y - 1].max(PROB_FLOOR).ln())
    }

    pub fn mean_loss(&self, d: &Dataset) -> Result<f64> {
        let labels = d.labels().ok_or(Error::LabelMissing)?;
        let mut total = 0.0;
        for i in 0..d.n() {
            total += self.loss(d.row(i), labels[i])?;
        }
        Ok(total / d.n() as f64)
    }

    /// Fraction of rows whose argmax prediction matches the label; argmax
    /// ties break toward the lowest class index.
    pub fn accuracy(&self, d: &Dataset) -> Result<f64> {
        let labels = d.labels().ok_or(Error::LabelMissing)?;
        let mut correct = 0usize;
        for i in 0..d.n() {
            let probs = self.predict_proba(d.row(i))?;
            let mut arg = 0;
            for (c, &p) in probs.iter().enumerate() {
                if p > probs[arg] {
                    arg = c;
                }
            }
            if arg + 1 == labels[i] {
                correct += 1;
            }
        }
        Ok(correct as f64 / d.n() as f64)
    }

    /// Gradients of the mean cross-entropy over the given rows, by
    /// backpropagation.
    pub fn batch_gradients(&self, xs: &[&[f64]], ys: &[usize]) -> Result<Vec<LayerGrads>> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.is_empty() {
            return Err(Error::TooFewSamples { got: 0, min: 1 });
        }
        let mut grads: Vec<LayerGrads> = self
            .layers
            .iter()
            .map(|l| LayerGrads {
                weights: vec![0.0; l.weights.len()],
                biases: vec![0.0; l.outputs],
            })
            .collect();
        let scale = 1.0 / xs.len() as f64;
        let last = self.layers.len() - 1;

        for (x, &y) in xs.iter().zip(ys) {
            if x.len() != self.input_width {
                return Err(Error::DimensionMismatch {
                    expected: self.input_width,
                    got: x.len(),
                });
            }
            if y == 0 || y > self.n_classes {
                return Err(Error::BadLabel {
                    label: y,
                    n_classes: self.n_classes,
                });
            }
            // Forward pass keeping every activation.
            let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
            acts.push(x.to_vec());
            for (l, layer) in self.layers.iter().enumerate() {
                let a = layer.forward(acts.last().unwrap(), l != last);
                acts.push(a);
            }
            // Softmax cross-entropy: dL/dlogit = p - onehot(y).
            let probs = softmax(&acts[self.layers.len()]);
            let mut delta: Vec<f64> = probs;
            delta[y - 1] -= 1.0;

            for l in (0..self.layers.len()).rev() {
                let input = &acts[l];
                let g = &mut grads[l];
                for (o, &dz) in delta.iter().enumerate() {
                    g.biases[o] += scale * dz;
                    let row = &mut g.weights[o * self.layers[l].inputs..(o + 1) * self.layers[l].inputs];
                    for (gw, &v) in row.iter_mut().zip(input) {
                        *gw += scale * dz * v;
                    }
                }
                if l > 0 {
                    let layer = &self.layers[l];
                    let mut prev = vec![0.0f64; layer.inputs];
                    for (o, &dz) in delta.iter().enumerate() {
                        let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                        for (p, &w) in prev.iter_mut().zip(row) {
                            *p += dz * w;
                        }
                    }
                    // ReLU gate on the previous layer's output.
                    for (p, &a) in prev.iter_mut().zip(&acts[l]) {
                        if a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        Ok(grads)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: MlpModel = serde_json::from_str(s)?;
        if model.version != MODEL_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported model format version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Trains with Adam and early stopping; returns the weights of the best
/// validation epoch together with the full per-epoch loss log.
pub fn train(train: &Dataset, validation: &Dataset, cfg: &MlpConfig) -> Result<MlpModel> {
    cfg.validate()?;
    let train_labels = train.labels().ok_or(Error::LabelMissing)?;
    let val_labels = validation.labels().ok_or(Error::LabelMissing)?;
    if train.width() != validation.width() {
        return Err(Error::DimensionMismatch {
            expected: train.width(),
            got: validation.width(),
        });
    }
    if train.n() == 0 || validation.n() == 0 {
        return Err(Error::TooFewSamples {
            got: train.n().min(validation.n()),
            min: 1,
        });
    }
    let n_classes = train_labels
        .iter()
        .chain(val_labels)
        .copied()
        .max()
        .ok_or(Error::LabelMissing)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = MlpModel::init_from_rng(train.width(), &cfg.hidden_sizes, n_classes, &mut rng);
    model.config = cfg.clone();

    // Adam state per layer.
    let mut m: Vec<LayerGrads> = model
        .layers
        .iter()
        .map(|l| LayerGrads {
            weights: vec![0.0; l.weights.len()],
            biases: vec![0.0; l.outputs],
        })
        .collect();
    let mut v = m.clone();
    let mut step = 0u32;

    let mut order: Vec<usize> = (0..train.n()).collect();
    let mut best_layers = model.layers.clone();
    let mut best_val = f64::INFINITY;
    let mut stale_epochs = 0usize;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| train.row(i)).collect();
            let ys: Vec<usize> = batch.iter().map(|&i| train_labels[i]).collect();
            let grads = model.batch_gradients(&xs, &ys)?;
            step += 1;
            let bias1 = 1.0 - cfg.adam_beta1.powi(step as i32);
            let bias2 = 1.0 - cfg.adam_beta2.powi(step as i32);
            for (l, g) in grads.iter().enumerate() {
                adam_update(
                    &mut model.layers[l].weights,
                    &g.weights,
                    &mut m[l].weights,
                    &mut v[l].weights,
                    cfg,
                    bias1,
                    bias2,
                );
                adam_update(
                    &mut model.layers[l].biases,
                    &g.biases,
                    &mut m[l].biases,
                    &mut v[l].biases,
                    cfg,
                    bias1,
                    bias2,
                );
            }
        }

        let train_loss = model.mean_loss(train)?;
        let val_loss = model.mean_loss(validation)?;
        model.training_log.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });
        if val_loss < best_val {
            best_val = val_loss;
            best_layers = model.layers.clone();
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= cfg.early_stopping_patience {
                break;
            }
        }
    }

    model.layers = best_layers;
    Ok(model)
}

fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    cfg: &MlpConfig,
    bias1: f64,
    bias2: f64,
) {
    for i in 0..params.len() {
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grads[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grads[i] * grads[i];
        let mhat = m[i] / bias1;
        let vhat = v[i] / bias2;
        params[i] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.adam_epsilon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{add_intercept, split, standardize, SplitSpec};
    use crate::fcps::{generate, FcpsShape, GenSpec};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hepta_splits(seed: u64) -> (Dataset, Dataset, Dataset) {
        let d = generate(&GenSpec::new(FcpsShape::Hepta, 600, seed, 0.0).unwrap()).unwrap();
        let labels = d.labels().unwrap().to_vec();
        let (std, _) = standardize(&d.without_labels()).unwrap();
        let full = add_intercept(&std).unwrap().with_labels(labels).unwrap();
        let parts = split(&full, &SplitSpec::new(vec![0.7, 0.15, 0.15], seed).unwrap()).unwrap();
        let mut it = parts.into_iter();
        (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
    }

    #[test]
    fn trains_hepta_to_high_accuracy() {
        let (tr, va, te) = hepta_splits(1);
        let model = train(&tr, &va, &MlpConfig { seed: 1, ..MlpConfig::default() }).unwrap();
        let acc = model.accuracy(&te).unwrap();
        assert!(acc >= 0.95, "held-out accuracy {acc}");
        assert!(model.training_log.len() <= 50);
    }

    #[test]
    fn single_class_labels_predict_that_class() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![1.0, i as f64 / 10.0]).collect();
        let names = vec!["x1".to_string()];
        let d = crate::data::Dataset::new(
            crate::matrix::Matrix::from_rows(&rows).unwrap(),
            names,
            Some(vec![1; 30]),
            false,
            true,
        )
        .unwrap();
        let cfg = MlpConfig { hidden_sizes: vec![4], max_epochs: 3, ..MlpConfig::default() };
        let model = train(&d, &d, &cfg).unwrap();
        assert_eq!(model.n_classes, 1);
        assert!((model.accuracy(&d).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(model.predict_proba(&[1.0, 0.3]).unwrap(), vec![1.0]);
    }

    #[test]
    fn best_epoch_no_worse_than_first() {
        let (tr, va, _) = hepta_splits(3);
        let model = train(&tr, &va, &MlpConfig { seed: 3, ..MlpConfig::default() }).unwrap();
        let first = model.training_log.first().unwrap().val_loss;
        let best = model
            .training_log
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert!(best <= first);
        // The returned weights are the best epoch's weights.
        let returned = model.mean_loss(&va).unwrap();
        assert!((returned - best).abs() < 1e-12, "returned {returned}, best {best}");
    }

    #[test]
    fn predict_proba_sums_to_one() {
        let model = MlpModel::init(4, &[7, 5], 3, 99);
        let x = [1.0, 0.2, -0.7, 1.5];
        let p = model.predict_proba(&x).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|&v| v >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        // Purity: same input, same output.
        assert_eq!(p, model.predict_proba(&x).unwrap());
    }

    #[test]
    fn zero_weight_network_is_uniform() {
        let mut model = MlpModel::init(3, &[5], 4, 0);
        for l in 0..model.layer_count() {
            model.layer_mut(l).weights.iter_mut().for_each(|w| *w = 0.0);
        }
        let p = model.predict_proba(&[1.0, 2.0, -3.0]).unwrap();
        for &v in &p {
            assert!((v - 0.25).abs() < 1e-15);
        }
        // Uniform prediction over C=4 classes: loss = ln 4.
        let l = model.loss(&[1.0, 2.0, -3.0], 2).unwrap();
        assert!((l - 4.0f64.ln()).abs() < 1e-12);
        assert!((l - 1.386_294_361_119_890_6).abs() < 1e-9);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let model = MlpModel::init(3, &[4], 2, 0);
        assert!(matches!(
            model.predict_proba(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn loss_perfect_and_floored() {
        // One-layer model rigged to saturate: huge logit gap.
        let mut model = MlpModel::init(1, &[1], 2, 0);
        for l in 0..model.layer_count() {
            model.layer_mut(l).weights.iter_mut().for_each(|w| *w = 0.0);
            model.layer_mut(l).biases.iter_mut().for_each(|b| *b = 0.0);
        }
        // logits (1000, 0): class 1 probability ~1, class 2 underflows to 0.
        model.layer_mut(1).biases[0] = 1000.0;
        let loss1 = model.loss(&[1.0], 1).unwrap();
        assert_eq!(loss1, 0.0);
        let loss2 = model.loss(&[1.0], 2).unwrap();
        assert!((loss2 - (-(PROB_FLOOR.ln()))).abs() < 1e-9);
        assert!((loss2 - 27.631_021_115_928_547).abs() < 1e-6);
    }

    #[test]
    fn loss_bad_label() {
        let model = MlpModel::init(2, &[3], 2, 0);
        assert!(matches!(model.loss(&[1.0, 0.0], 0), Err(Error::BadLabel { .. })));
        assert!(matches!(model.loss(&[1.0, 0.0], 3), Err(Error::BadLabel { .. })));
    }

    #[test]
    fn constant_model_on_balanced_four_classes() {
        let mut model = MlpModel::init(2, &[3], 4, 5);
        for l in 0..model.layer_count() {
            model.layer_mut(l).weights.iter_mut().for_each(|w| *w = 0.0);
        }
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![1.0, i as f64]).collect();
        let labels: Vec<usize> = (0..100).map(|i| (i % 4) + 1).collect();
        let d = crate::data::Dataset::new(
            crate::matrix::Matrix::from_rows(&rows).unwrap(),
            vec!["x1".to_string()],
            Some(labels),
            false,
            true,
        )
        .unwrap();
        // Uniform probabilities, argmax ties to class 1: exactly the class-1 share.
        assert!((model.accuracy(&d).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let (tr, va, _) = hepta_splits(7);
        let cfg = MlpConfig { seed: 7, max_epochs: 8, ..MlpConfig::default() };
        let a = train(&tr, &va, &cfg).unwrap();
        let b = train(&tr, &va, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let step = 1e-4;
        for trial in 0..5 {
            let mut model = MlpModel::init(4, &[7, 5], 3, 1000 + trial);
            // Nonzero biases make the check cover them too.
            for l in 0..model.layer_count() {
                for b in &mut model.layer_mut(l).biases {
                    *b = rng.random_range(-0.1..0.1);
                }
            }
            let xs_owned: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..4).map(|_| rng.random_range(-1.5..1.5)).collect())
                .collect();
            let xs: Vec<&[f64]> = xs_owned.iter().map(Vec::as_slice).collect();
            let ys: Vec<usize> = (0..5).map(|_| rng.random_range(1..=3)).collect();
            let grads = model.batch_gradients(&xs, &ys).unwrap();

            let mean_loss = |m: &MlpModel| -> f64 {
                xs.iter()
                    .zip(&ys)
                    .map(|(x, &y)| m.loss(x, y).unwrap())
                    .sum::<f64>()
                    / xs.len() as f64
            };
            let mut checked = 0;
            for l in 0..model.layer_count() {
                for idx in 0..model.layer(l).weights.len() {
                    let orig = model.layer(l).weights[idx];
                    model.layer_mut(l).weights[idx] = orig + step;
                    let up = mean_loss(&model);
                    model.layer_mut(l).weights[idx] = orig - step;
                    let down = mean_loss(&model);
                    model.layer_mut(l).weights[idx] = orig;
                    let fd = (up - down) / (2.0 * step);
                    let an = grads[l].weights[idx];
                    if an.abs() < 1e-8 && fd.abs() < 1e-8 {
                        continue;
                    }
                    let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(1e-10);
                    assert!(rel < 1e-3, "layer {l} weight {idx}: {an} vs {fd} (rel {rel})");
                    checked += 1;
                }
            }
            assert!(checked > 20, "too few informative weights checked");
        }
    }

    #[test]
    fn model_json_roundtrip() {
        let (tr, va, _) = hepta_splits(2);
        let cfg = MlpConfig { seed: 2, max_epochs: 3, ..MlpConfig::default() };
        let model = train(&tr, &va, &cfg).unwrap();
        let json = model.to_json().unwrap();
        let back = MlpModel::from_json(&json).unwrap();
        assert_eq!(model, back);
        assert_eq!(model.fingerprint(), back.fingerprint());
    }
}
