//! Multinomial naive Bayes with additive smoothing.

use super::{check_inputs, encode_labels, Classifier, ModelParameters, TrainError};
use crate::features::SparseVector;
use crate::labels::Label;

/// Log-prior `ln(n_c / N)` and term log-likelihood
/// `ln((tc + s) / (Σ tc + s·V))` per class.
pub fn train_naive_bayes(x: &[SparseVector], y: &[Label], smoothing: f64) -> Result<Classifier, TrainError> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(TrainError::InvalidSmoothing(smoothing));
    }
    let dim = check_inputs(x, y)?;
    let (label_set, codes) = encode_labels(y)?;
    let k = label_set.len();

    let mut term_counts = vec![vec![0.0f64; dim]; k];
    let mut class_counts = vec![0usize; k];
    for (v, &c) in x.iter().zip(&codes) {
        class_counts[c] += 1;
        for &(i, w) in &v.entries {
            if w < 0.0 {
                return Err(TrainError::NegativeFeature);
            }
            term_counts[c][i as usize] += w;
        }
    }
    let n = x.len() as f64;
    let class_log_prior = class_counts.iter().map(|&c| (c as f64 / n).ln()).collect();
    let feature_log_prob = term_counts
        .into_iter()
        .map(|row| {
            let total: f64 = row.iter().sum::<f64>() + smoothing * dim as f64;
            let log_total = total.ln();
            row.into_iter().map(|tc| (tc + smoothing).ln() - log_total).collect()
        })
        .collect();
    Ok(Classifier {
        label_set,
        parameters: ModelParameters::NaiveBayes { class_log_prior, feature_log_prob },
    })
}
