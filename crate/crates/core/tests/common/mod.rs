//! Brute-force reference implementations and random data generators shared
//! by the integration tests.
#![allow(dead_code)]

use genre_grid::annotation::{AnnotationRecord, RawLabel};
use genre_grid::grid::SentenceLabelPair;
use genre_grid::{Label, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Alpha by enumerating every ordered pair of values, within units for the
/// observed disagreement and across all pairable values for the expected
/// one. `None` when expected disagreement is zero or fewer than two units
/// are pairable.
pub fn alpha_pairwise(units: &[Vec<usize>], values: &[f64], metric: &str) -> Option<f64> {
    let pairable: Vec<&Vec<usize>> = units.iter().filter(|u| u.len() >= 2).collect();
    if pairable.len() < 2 {
        return None;
    }
    let all: Vec<usize> = pairable.iter().flat_map(|u| u.iter().copied()).collect();
    let n = all.len() as f64;
    let freq = |c: usize| all.iter().filter(|&&v| v == c).count() as f64;
    let delta = |a: usize, b: usize| -> f64 {
        match metric {
            "nominal" => f64::from(a != b),
            "interval" => (values[a] - values[b]).powi(2),
            "ordinal" => {
                let (lo, hi) = (a.min(b), a.max(b));
                let mut s = 0.0;
                for g in lo..=hi {
                    s += freq(g);
                }
                (s - (freq(lo) + freq(hi)) / 2.0).powi(2)
            }
            _ => unreachable!(),
        }
    };

    let mut observed = 0.0;
    for u in &pairable {
        let m = u.len() as f64;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j {
                    observed += delta(u[i], u[j]) / (m - 1.0);
                }
            }
        }
    }
    observed /= n;

    let mut expected = 0.0;
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i != j {
                expected += delta(all[i], all[j]);
            }
        }
    }
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return None;
    }
    Some(1.0 - observed / expected)
}

/// Random units of category codes: up to 10 units, 2–4 raters with missing
/// values, 2–4 categories.
pub fn random_units(rng: &mut ChaCha8Rng) -> (Vec<Vec<usize>>, usize) {
    let k = rng.random_range(2..=4);
    let raters = rng.random_range(2..=4);
    let n_units = rng.random_range(2..=10);
    let units = (0..n_units)
        .map(|_| {
            let mut unit = Vec::new();
            for _ in 0..raters {
                if rng.random_bool(0.8) {
                    unit.push(rng.random_range(0..k));
                }
            }
            unit
        })
        .collect();
    (units, k)
}

/// Factuality annotation records built from code units (code i = i-th label).
pub fn factuality_records(units: &[Vec<usize>]) -> Vec<AnnotationRecord> {
    let labels = Task::Factuality.labels();
    let mut out = Vec::new();
    for (u, codes) in units.iter().enumerate() {
        for (r, &c) in codes.iter().enumerate() {
            out.push(AnnotationRecord {
                sentence_id: format!("s{u}"),
                annotator_id: format!("a{r}"),
                task: Task::Factuality,
                raw_label: RawLabel::Category(labels[c]),
            });
        }
    }
    out
}

pub struct ClassOracle {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

pub struct MetricOracle {
    pub per_class: Vec<ClassOracle>,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

/// Metrics straight from their definitions, counting every (truth, guess)
/// pair per class; 0/0 is taken as 0.
pub fn metrics_by_counting(y_true: &[usize], y_pred: &[usize], k: usize) -> MetricOracle {
    let n = y_true.len();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let mut per_class = Vec::new();
    for c in 0..k {
        let mut tp = 0;
        let mut predicted = 0;
        let mut actual = 0;
        for i in 0..n {
            if y_pred[i] == c {
                predicted += 1;
            }
            if y_true[i] == c {
                actual += 1;
                if y_pred[i] == c {
                    tp += 1;
                }
            }
        }
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        per_class.push(ClassOracle { precision, recall, f1, support: actual });
    }
    let correct = (0..n).filter(|&i| y_true[i] == y_pred[i]).count();
    let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / k as f64;
    let weighted_f1 = per_class.iter().map(|c| c.f1 * c.support as f64).sum::<f64>() / n as f64;
    MetricOracle { per_class, accuracy: ratio(correct, n), macro_f1, weighted_f1 }
}

/// Random labeled sentences over `n_items` items with 1–`max_len` sentences each.
pub fn random_pairs(rng: &mut ChaCha8Rng, n_items: usize, max_len: usize) -> Vec<SentenceLabelPair> {
    let fact = Task::Factuality.labels();
    let mut out = Vec::new();
    for i in 0..n_items {
        let len = rng.random_range(1..=max_len);
        for pos in 0..len {
            out.push(SentenceLabelPair {
                sentence_id: format!("it{i}:{pos}"),
                item_id: format!("it{i}"),
                position: pos,
                factuality: fact[rng.random_range(0..fact.len())],
                formality: if rng.random_bool(0.5) { Label::Formal } else { Label::Informal },
            });
        }
    }
    out
}

/// Linearly separable formality corpus: neutral filler words plus at least
/// one marker word drawn from a class-specific vocabulary.
pub fn separable_corpus(n: usize, seed: u64) -> (Vec<String>, Vec<Label>) {
    const FILLER: &[&str] = &["de", "het", "een", "vandaag", "in", "op", "met", "stad", "mensen", "jaar", "over", "ook"];
    const FORMAL: &[&str] = &["derhalve", "voorts", "betreffende", "aldus", "teneinde", "alsmede"];
    const INFORMAL: &[&str] = &["joh", "haha", "vet", "lekker", "gewoon", "super"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (label, markers) = if i % 2 == 0 { (Label::Formal, FORMAL) } else { (Label::Informal, INFORMAL) };
        let mut words: Vec<&str> = (0..rng.random_range(4..10)).map(|_| FILLER[rng.random_range(0..FILLER.len())]).collect();
        for _ in 0..rng.random_range(1..3) {
            let at = rng.random_range(0..=words.len());
            words.insert(at, markers[rng.random_range(0..markers.len())]);
        }
        texts.push(words.join(" "));
        labels.push(label);
    }
    (texts, labels)
}
