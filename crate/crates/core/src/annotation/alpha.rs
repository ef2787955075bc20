//! Krippendorff's alpha over a coincidence matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{group_by_sentence, merge_likert, AnnotationError, AnnotationRecord, RawLabel};
use crate::labels::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliabilityMetric {
    Nominal,
    Ordinal,
    Interval,
}

impl fmt::Display for ReliabilityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReliabilityMetric::Nominal => "nominal",
            ReliabilityMetric::Ordinal => "ordinal",
            ReliabilityMetric::Interval => "interval",
        })
    }
}

impl FromStr for ReliabilityMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nominal" => Ok(ReliabilityMetric::Nominal),
            "ordinal" => Ok(ReliabilityMetric::Ordinal),
            "interval" => Ok(ReliabilityMetric::Interval),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub task: Task,
    pub alpha: f64,
    pub metric: ReliabilityMetric,
    /// Units with at least two ratings.
    pub n_units: usize,
    /// Distinct raters contributing to those units.
    pub n_raters: usize,
    pub n_pairable_values: usize,
}

/// Reliability data as value codes per unit.
///
/// Codes index `code_values`, which must be sorted ascending; for ordinal
/// distances the code order is the rank order, for interval distances the
/// value is used directly.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedUnits {
    pub units: Vec<Vec<usize>>,
    pub code_values: Vec<f64>,
}

/// Alpha plus the number of pairable values.
pub fn alpha_from_codes(data: &CodedUnits, metric: ReliabilityMetric) -> Result<(f64, usize), AnnotationError> {
    let k = data.code_values.len();
    let pairable: Vec<&Vec<usize>> = data.units.iter().filter(|u| u.len() >= 2).collect();
    if pairable.len() < 2 {
        return Err(AnnotationError::InsufficientData(pairable.len()));
    }

    let mut coincidence = vec![vec![0.0f64; k]; k];
    for unit in &pairable {
        let mut counts = vec![0usize; k];
        for &c in unit.iter() {
            counts[c] += 1;
        }
        let weight = 1.0 / (unit.len() - 1) as f64;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * (counts[c] - 1)
                } else {
                    counts[c] * counts[d]
                };
                coincidence[c][d] += pairs as f64 * weight;
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();

    let delta = distance_matrix(metric, &data.code_values, &marginals);
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            observed += coincidence[c][d] * delta[c][d];
            expected += marginals[c] * marginals[d] * delta[c][d];
        }
    }
    if expected <= 0.0 {
        return Err(AnnotationError::Degenerate);
    }
    Ok((1.0 - (n - 1.0) * observed / expected, n.round() as usize))
}

fn distance_matrix(metric: ReliabilityMetric, values: &[f64], marginals: &[f64]) -> Vec<Vec<f64>> {
    let k = values.len();
    let mut delta = vec![vec![0.0; k]; k];
    for c in 0..k {
        for d in 0..k {
            delta[c][d] = match metric {
                ReliabilityMetric::Nominal => f64::from(c != d),
                ReliabilityMetric::Interval => (values[c] - values[d]).powi(2),
                ReliabilityMetric::Ordinal => {
                    let (lo, hi) = (c.min(d), c.max(d));
                    let span: f64 = marginals[lo..=hi].iter().sum();
                    (span - (marginals[lo] + marginals[hi]) / 2.0).powi(2)
                }
            };
        }
    }
    delta
}

/// Krippendorff's alpha for one task, with sentences as units.
///
/// Factuality supports only the nominal metric. Formality with the nominal
/// metric uses merged informal/formal labels (neutral ratings count as
/// missing); ordinal and interval use the raw 1–5 scale.
pub fn krippendorff_alpha(
    records: &[AnnotationRecord],
    task: Task,
    metric: ReliabilityMetric,
) -> Result<ReliabilityReport, AnnotationError> {
    if task == Task::Factuality && metric != ReliabilityMetric::Nominal {
        return Err(AnnotationError::MetricNotApplicable { task, metric });
    }
    let labels = task.labels();
    let raw_scale = task == Task::Formality && metric != ReliabilityMetric::Nominal;
    let code_values: Vec<f64> = if raw_scale {
        (1..=5).map(f64::from).collect()
    } else {
        (0..labels.len()).map(|i| i as f64).collect()
    };

    let mut units = Vec::new();
    let mut raters = BTreeSet::new();
    for (_, ratings) in group_by_sentence(records, task)? {
        let mut unit = Vec::with_capacity(ratings.len());
        let mut who = Vec::with_capacity(ratings.len());
        for r in ratings {
            let code = match r.raw_label {
                RawLabel::Likert(v) if raw_scale => Some(v as usize - 1),
                RawLabel::Likert(v) => merge_likert(v as i64)?
                    .label()
                    .and_then(|l| labels.iter().position(|&x| x == l)),
                RawLabel::Category(l) => labels.iter().position(|&x| x == l),
            };
            if let Some(code) = code {
                unit.push(code);
                who.push(r.annotator_id.as_str());
            }
        }
        if unit.len() >= 2 {
            raters.extend(who);
            units.push(unit);
        }
    }

    let n_units = units.len();
    let (alpha, n_pairable_values) = alpha_from_codes(&CodedUnits { units, code_values }, metric)?;
    Ok(ReliabilityReport {
        task,
        alpha,
        metric,
        n_units,
        n_raters: raters.len(),
        n_pairable_values,
    })
}
