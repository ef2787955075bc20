//! Seeded, stratified train/validation/test splits and k-fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::labels::Label;

/// Test share of all rows, then validation share of the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub test: f64,
    pub validation: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { test: 0.2, validation: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    /// Train and validation rows together, ascending.
    pub fn non_test(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.train.iter().chain(&self.validation).copied().collect();
        rows.sort_unstable();
        rows
    }
}

/// Per class: shuffle, take `round(test·n)` for test, then
/// `round(validation·rest)` for validation, the remainder for training.
pub fn stratified_split(
    labels: &[Label],
    label_set: &[Label],
    ratios: SplitRatios,
    seed: u64,
) -> Result<SplitSpec, TrainError> {
    if let Some(l) = labels.iter().find(|l| !label_set.contains(l)) {
        return Err(TrainError::UnknownLabel(*l));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = SplitSpec {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
        stratified: true,
    };
    for &class in label_set {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if rows.is_empty() {
            return Err(TrainError::EmptyClass(class));
        }
        rows.shuffle(&mut rng);
        let n = rows.len();
        let n_test = ((n as f64) * ratios.test).round() as usize;
        let n_val = (((n - n_test) as f64) * ratios.validation).round() as usize;
        split.test.extend_from_slice(&rows[..n_test]);
        split.validation.extend_from_slice(&rows[n_test..n_test + n_val]);
        split.train.extend_from_slice(&rows[n_test + n_val..]);
    }
    split.train.sort_unstable();
    split.validation.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Assigns each of `rows` to one of `folds` folds, class by class in
/// round-robin after a seeded shuffle. Returns the validation rows per fold.
pub fn stratified_folds(
    rows: &[usize],
    label_of: impl Fn(usize) -> Label,
    folds: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, TrainError> {
    if folds < 2 || rows.len() < folds {
        return Err(TrainError::TooFewExamples { n: rows.len(), folds });
    }
    let labels: Vec<Label> = rows.iter().map(|&r| label_of(r)).collect();
    let mut classes = labels.clone();
    classes.sort();
    classes.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0usize;
    for class in classes {
        let mut members: Vec<usize> = rows
            .iter()
            .zip(&labels)
            .filter(|(_, l)| **l == class)
            .map(|(&r, _)| r)
            .collect();
        members.shuffle(&mut rng);
        for r in members {
            out[next % folds].push(r);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}
