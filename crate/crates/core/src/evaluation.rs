//! Confusion matrices and per-class / averaged precision, recall and F1.

use std::fmt::{self, Display, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("y_true has {truth} labels but y_pred has {pred}")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("label `{0}` is not in the label set")]
    UnknownLabel(String),
    #[error("cannot evaluate zero predictions")]
    Empty,
}

/// `cells[i][j]` counts items of true class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.cells.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.cells.len()).map(|i| self.cells[i][i]).sum()
    }
}

fn position<L: PartialEq + Display>(label_set: &[L], l: &L) -> Result<usize, EvalError> {
    label_set
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| EvalError::UnknownLabel(l.to_string()))
}

pub fn confusion_matrix<L: PartialEq + Display>(
    y_true: &[L],
    y_pred: &[L],
    label_set: &[L],
) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch { truth: y_true.len(), pred: y_pred.len() });
    }
    let k = label_set.len();
    let mut cells = vec![vec![0usize; k]; k];
    for (t, p) in y_true.iter().zip(y_pred) {
        cells[position(label_set, t)?][position(label_set, p)?] += 1;
    }
    Ok(ConfusionMatrix {
        labels: label_set.iter().map(|l| l.to_string()).collect(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    /// Set when precision or recall had a zero denominator and was defined as 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub zero_division: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassScores>,
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
    pub confusion: ConfusionMatrix,
    pub n: usize,
}

impl EvaluationReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self, EvalError> {
        let n = confusion.total();
        if n == 0 {
            return Err(EvalError::Empty);
        }
        let k = confusion.labels.len();
        let cells = &confusion.cells;
        let per_class: Vec<ClassScores> = (0..k)
            .map(|c| {
                let tp = cells[c][c];
                let predicted: usize = (0..k).map(|i| cells[i][c]).sum();
                let support: usize = cells[c].iter().sum();
                let mut zero_division = false;
                let mut ratio = |num: usize, den: usize| {
                    if den == 0 {
                        zero_division = true;
                        0.0
                    } else {
                        num as f64 / den as f64
                    }
                };
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassScores {
                    label: confusion.labels[c].clone(),
                    precision,
                    recall,
                    f1,
                    support,
                    zero_division,
                }
            })
            .collect();

        let kf = k.max(1) as f64;
        let macro_avg = Averages {
            precision: per_class.iter().map(|c| c.precision).sum::<f64>() / kf,
            recall: per_class.iter().map(|c| c.recall).sum::<f64>() / kf,
            f1: per_class.iter().map(|c| c.f1).sum::<f64>() / kf,
        };
        let nf = n as f64;
        let weighted = |f: fn(&ClassScores) -> f64| {
            per_class.iter().map(|c| f(c) * c.support as f64).sum::<f64>() / nf
        };
        let weighted_avg = Averages {
            precision: weighted(|c| c.precision),
            recall: weighted(|c| c.recall),
            f1: weighted(|c| c.f1),
        };
        Ok(EvaluationReport {
            accuracy: confusion.trace() as f64 / nf,
            per_class,
            macro_avg,
            weighted_avg,
            confusion,
            n,
        })
    }

    pub fn macro_f1(&self) -> f64 {
        self.macro_avg.f1
    }

    pub fn any_zero_division(&self) -> bool {
        self.per_class.iter().any(|c| c.zero_division)
    }
}

pub fn evaluate<L: PartialEq + Display>(
    y_true: &[L],
    y_pred: &[L],
    label_set: &[L],
) -> Result<EvaluationReport, EvalError> {
    if y_true.is_empty() && y_pred.is_empty() {
        return Err(EvalError::Empty);
    }
    EvaluationReport::from_confusion(confusion_matrix(y_true, y_pred, label_set)?)
}

/// Aligned text table in the usual classification-report layout.
impl Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .per_class
            .iter()
            .map(|c| c.label.len())
            .chain([13])
            .max()
            .unwrap_or(13);
        let mut out = String::new();
        let _ = writeln!(out, "{:width$}  {:>9}  {:>9}  {:>9}  {:>7}", "", "precision", "recall", "f1", "n");
        for c in &self.per_class {
            let _ = writeln!(
                out,
                "{:width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>7}",
                c.label, c.precision, c.recall, c.f1, c.support
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:width$}  {:>9}  {:>9}  {:>9.2}  {:>7}", "accuracy", "", "", self.accuracy, self.n);
        for (name, a) in [("macro avg", self.macro_avg), ("weighted avg", self.weighted_avg)] {
            let _ = writeln!(
                out,
                "{:width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>7}",
                name, a.precision, a.recall, a.f1, self.n
            );
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_cases() {
        let m = confusion_matrix(&["a", "a", "b", "b"], &["a", "b", "b", "b"], &["a", "b"]).unwrap();
        assert_eq!(m.cells, vec![vec![1, 1], vec![0, 2]]);
        let m = confusion_matrix(&["a", "b", "c"], &["a", "b", "c"], &["a", "b", "c"]).unwrap();
        assert_eq!(m.cells, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let m = confusion_matrix(&["a", "b", "c"], &["b", "b", "b"], &["a", "b", "c"]).unwrap();
        assert!(m.cells.iter().all(|r| r[0] == 0 && r[2] == 0));
        assert_eq!(
            confusion_matrix(&["a"], &["z"], &["a", "b"]),
            Err(EvalError::UnknownLabel("z".into()))
        );
        assert!(matches!(confusion_matrix(&["a"], &[], &["a"]), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn binary_fixture() {
        // [[2,0],[1,1]]: P=(2/3,1), R=(1,1/2), F1=(0.8,2/3)
        let r = evaluate(&["a", "a", "b", "b"], &["a", "a", "a", "b"], &["a", "b"]).unwrap();
        assert_eq!(r.confusion.cells, vec![vec![2, 0], vec![1, 1]]);
        let eps = 1e-12;
        assert!((r.per_class[0].precision - 2.0 / 3.0).abs() < eps);
        assert!((r.per_class[1].precision - 1.0).abs() < eps);
        assert!((r.per_class[0].recall - 1.0).abs() < eps);
        assert!((r.per_class[1].recall - 0.5).abs() < eps);
        assert!((r.per_class[0].f1 - 0.8).abs() < eps);
        assert!((r.per_class[1].f1 - 2.0 / 3.0).abs() < eps);
        assert!((r.macro_f1() - 11.0 / 15.0).abs() < eps);
        assert_eq!(format!("{:.4}", r.macro_f1()), "0.7333");
        assert_eq!(r.accuracy, 0.75);
    }

    #[test]
    fn perfect_three_class() {
        let y = ["x", "y", "z", "x"];
        let r = evaluate(&y, &y, &["x", "y", "z"]).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_avg, Averages { precision: 1.0, recall: 1.0, f1: 1.0 });
        assert_eq!(r.weighted_avg, Averages { precision: 1.0, recall: 1.0, f1: 1.0 });
    }

    #[test]
    fn zero_division_is_flagged() {
        let r = evaluate(&["a", "b"], &["a", "a"], &["a", "b"]).unwrap();
        assert_eq!(r.per_class[1].precision, 0.0);
        assert!(r.per_class[1].zero_division);
        assert!(!r.per_class[0].zero_division);
        assert!(r.to_string().contains("macro avg"));
    }
}
