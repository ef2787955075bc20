//! One-vs-rest linear SVM trained with Pegasos-style subgradient descent.
//!
//! Each binary problem minimizes `(reg/2)·‖w‖² + mean hinge loss`, where the
//! bias is carried as a constant feature and is regularized with the weights.
//! The step size at update `t` is `1/(reg·t)`, followed by projection onto the
//! ball of radius `1/√reg`. Example order per epoch is a seeded shuffle,
//! shared by all classes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_inputs, encode_labels, Classifier, ModelParameters, TrainError};
use crate::features::SparseVector;
use crate::labels::Label;

/// `(reg/2)(‖w‖² + b²) + mean(max(0, 1 − y(w·x + b)))` with `y ∈ {−1, +1}`.
pub fn objective(weights: &[f64], bias: f64, x: &[SparseVector], y: &[f64], reg: f64) -> f64 {
    let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>() + bias * bias;
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(v, &t)| (1.0 - t * (v.dot(weights) + bias)).max(0.0))
        .sum();
    0.5 * reg * norm + hinge / x.len() as f64
}

fn train_binary(x: &[SparseVector], y: &[f64], dim: usize, reg: f64, orders: &[Vec<usize>]) -> (Vec<f64>, f64) {
    // w = scale · (rows, bias)
    let mut rows = vec![0.0; dim];
    let mut b = 0.0;
    let mut scale = 1.0f64;
    let mut sq_norm = 0.0f64; // of (rows, b), unscaled
    let radius_sq = 1.0 / reg;
    let mut t = 0u64;
    for order in orders {
        for &i in order {
            t += 1;
            let eta = 1.0 / (reg * t as f64);
            let dot = x[i].dot(&rows) + b;
            let margin = y[i] * scale * dot;
            let decay = 1.0 - eta * reg;
            if decay <= 0.0 {
                rows.iter_mut().for_each(|w| *w = 0.0);
                b = 0.0;
                sq_norm = 0.0;
                scale = 1.0;
            } else {
                scale *= decay;
            }
            if margin < 1.0 {
                let a = eta * y[i] / scale;
                let dot_now = if decay <= 0.0 { 0.0 } else { dot };
                let x_sq = x[i].squared_norm() + 1.0;
                sq_norm += 2.0 * a * dot_now + a * a * x_sq;
                for &(j, xj) in &x[i].entries {
                    rows[j as usize] += a * xj;
                }
                b += a;
            }
            let norm_sq = scale * scale * sq_norm.max(0.0);
            if norm_sq > radius_sq {
                scale *= (radius_sq / norm_sq).sqrt();
            }
            if scale < 1e-9 {
                rows.iter_mut().for_each(|w| *w *= scale);
                b *= scale;
                sq_norm *= scale * scale;
                scale = 1.0;
            }
        }
    }
    (rows.into_iter().map(|w| w * scale).collect(), b * scale)
}

pub fn train_linear_svm(
    x: &[SparseVector],
    y: &[Label],
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<Classifier, TrainError> {
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(TrainError::InvalidRegularization(reg));
    }
    if epochs == 0 {
        return Err(TrainError::InvalidHyperparameter("epochs must be at least 1".into()));
    }
    let dim = check_inputs(x, y)?;
    let (label_set, codes) = encode_labels(y)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<usize>> = (0..epochs)
        .map(|_| {
            let mut o: Vec<usize> = (0..x.len()).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();

    let mut weights = Vec::with_capacity(label_set.len());
    let mut bias = Vec::with_capacity(label_set.len());
    for c in 0..label_set.len() {
        let targets: Vec<f64> = codes.iter().map(|&k| if k == c { 1.0 } else { -1.0 }).collect();
        let (w, b) = train_binary(x, &targets, dim, reg, &orders);
        weights.push(w);
        bias.push(b);
    }
    Ok(Classifier {
        label_set,
        parameters: ModelParameters::LinearSvm { weights, bias },
    })
}
