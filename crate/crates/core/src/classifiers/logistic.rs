//! Multinomial (softmax) logistic regression.
//!
//! Minimizes mean cross-entropy plus `(l2/2)·‖W‖²` (bias unregularized) with
//! mini-batch proximal gradient steps: the data gradient is applied first,
//! then the weights are shrunk by `1/(1 + lr·l2)`. Shrinking is tracked as a
//! lazy scale factor, so one example costs O(nnz) rather than O(V·K).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_inputs, encode_labels, softmax, Classifier, ModelParameters, TrainError};
use crate::features::SparseVector;
use crate::labels::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
    /// Examples per step; `None` means full-batch.
    #[serde(default)]
    pub batch_size: Option<usize>,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self { l2: 1e-2, lr: 0.1, epochs: 50, batch_size: Some(32) }
    }
}

/// Cross-entropy objective and its gradient w.r.t. weights and bias.
pub fn objective_and_gradient(
    weights: &[Vec<f64>],
    bias: &[f64],
    x: &[SparseVector],
    y: &[usize],
    l2: f64,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let k = bias.len();
    let dim = weights.first().map_or(0, Vec::len);
    let n = x.len() as f64;
    let mut grad_w = vec![vec![0.0; dim]; k];
    let mut grad_b = vec![0.0; k];
    let mut loss = 0.0;
    for (v, &c) in x.iter().zip(y) {
        let z: Vec<f64> = weights.iter().zip(bias).map(|(w, b)| v.dot(w) + b).collect();
        loss += log_sum_exp(&z) - z[c];
        let p = softmax(&z);
        for j in 0..k {
            let err = p[j] - f64::from(j == c);
            grad_b[j] += err / n;
            for &(i, xi) in &v.entries {
                grad_w[j][i as usize] += err * xi / n;
            }
        }
    }
    let mut reg = 0.0;
    for (w, g) in weights.iter().zip(&mut grad_w) {
        for (wi, gi) in w.iter().zip(g.iter_mut()) {
            reg += wi * wi;
            *gi += l2 * wi;
        }
    }
    (loss / n + 0.5 * l2 * reg, grad_w, grad_b)
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

struct ScaledWeights {
    rows: Vec<Vec<f64>>,
    scale: f64,
}

impl ScaledWeights {
    fn materialize(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|w| w * self.scale).collect())
            .collect()
    }

    fn renormalize(&mut self) {
        for r in &mut self.rows {
            for w in r.iter_mut() {
                *w *= self.scale;
            }
        }
        self.scale = 1.0;
    }
}

/// Trains and also returns the full-data objective after each epoch.
pub fn train_with_history(
    x: &[SparseVector],
    y: &[Label],
    config: &LogisticConfig,
    seed: u64,
) -> Result<(Classifier, Vec<f64>), TrainError> {
    if config.epochs == 0 {
        return Err(TrainError::InvalidHyperparameter("epochs must be at least 1".into()));
    }
    let valid = config.lr > 0.0 && config.l2 >= 0.0;
    if !valid {
        return Err(TrainError::InvalidHyperparameter(format!(
            "lr must be positive and l2 nonnegative (lr={}, l2={})",
            config.lr, config.l2
        )));
    }
    if config.batch_size == Some(0) {
        return Err(TrainError::InvalidHyperparameter("batch_size must be at least 1".into()));
    }
    let dim = check_inputs(x, y)?;
    let (label_set, codes) = encode_labels(y)?;
    let k = label_set.len();
    let n = x.len();
    let batch = config.batch_size.unwrap_or(n).min(n);
    let shrink = 1.0 / (1.0 + config.lr * config.l2);

    let mut w = ScaledWeights { rows: vec![vec![0.0; dim]; k], scale: 1.0 };
    let mut bias = vec![0.0; k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut errors = vec![0.0; k];

    for _ in 0..config.epochs {
        if batch < n {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let m = chunk.len() as f64;
            // residuals for the whole batch are computed before any update
            let residuals: Vec<Vec<f64>> = chunk
                .iter()
                .map(|&i| {
                    let z: Vec<f64> = w
                        .rows
                        .iter()
                        .zip(&bias)
                        .map(|(row, b)| w.scale * x[i].dot(row) + b)
                        .collect();
                    let mut p = softmax(&z);
                    p[codes[i]] -= 1.0;
                    p
                })
                .collect();
            errors.iter_mut().for_each(|e| *e = 0.0);
            let step = config.lr / (m * w.scale);
            for (&i, r) in chunk.iter().zip(&residuals) {
                for j in 0..k {
                    errors[j] += r[j];
                    if r[j] != 0.0 {
                        let row = &mut w.rows[j];
                        for &(t, xt) in &x[i].entries {
                            row[t as usize] -= step * r[j] * xt;
                        }
                    }
                }
            }
            for j in 0..k {
                bias[j] -= config.lr * errors[j] / m;
            }
            w.scale *= shrink;
            if w.scale < 1e-9 {
                w.renormalize();
            }
        }
        let weights = w.materialize();
        let (loss, _, _) = objective_and_gradient(&weights, &bias, x, &codes, config.l2);
        if !loss.is_finite() {
            return Err(TrainError::Diverged { lr: config.lr });
        }
        history.push(loss);
    }

    let classifier = Classifier {
        label_set,
        parameters: ModelParameters::LogisticRegression { weights: w.materialize(), bias },
    };
    Ok((classifier, history))
}

pub fn train_logistic_regression(
    x: &[SparseVector],
    y: &[Label],
    config: &LogisticConfig,
    seed: u64,
) -> Result<Classifier, TrainError> {
    train_with_history(x, y, config, seed).map(|(c, _)| c)
}
