//! Exhaustive grid search with stratified k-fold cross-validation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{
    predict, stratified_folds, LogisticConfig, ModelConfig, ModelSpec, SplitSpec, TrainError,
    TrainedModel, VectorizerKind,
};
use crate::evaluation::evaluate;
use crate::labels::{Label, Task};

/// Row-indexed access to labeled sentences.
///
/// Grid search reads rows only through this trait, which lets tests verify
/// that held-out rows are never touched.
pub trait ExampleSource {
    fn len(&self) -> usize;
    fn text(&self, row: usize) -> &str;
    fn label(&self, row: usize) -> Label;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSentences {
    pub texts: Vec<String>,
    pub labels: Vec<Label>,
}

impl ExampleSource for LabeledSentences {
    fn len(&self) -> usize {
        self.texts.len()
    }

    fn text(&self, row: usize) -> &str {
        &self.texts[row]
    }

    fn label(&self, row: usize) -> Label {
        self.labels[row]
    }
}

/// Default grid: both vectorizers × `min_df ∈ {1, 2}` × each model family.
pub fn default_grid() -> Vec<ModelConfig> {
    let mut models = Vec::new();
    for smoothing in [0.1, 0.5, 1.0] {
        models.push(ModelSpec::NaiveBayes { smoothing });
    }
    for l2 in [1e-3, 1e-2, 1e-1] {
        models.push(ModelSpec::LogisticRegression(LogisticConfig { l2, ..LogisticConfig::default() }));
    }
    for reg in [1e-4, 1e-3, 1e-2] {
        models.push(ModelSpec::LinearSvm { reg, epochs: 20 });
    }
    let mut grid = Vec::new();
    for vectorizer in [VectorizerKind::Counts, VectorizerKind::Tfidf] {
        for min_df in [1, 2] {
            for &model in &models {
                grid.push(ModelConfig { vectorizer, min_df, model });
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    /// Position of the cell in the input grid.
    pub index: usize,
    pub config: ModelConfig,
    pub fold_macro_f1: Vec<f64>,
    pub mean_macro_f1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchOutcome {
    /// Best first; failed cells last.
    pub ranked: Vec<CellResult>,
    /// Best configuration refit on all non-test rows.
    pub best: TrainedModel,
}

fn evaluate_cell<S: ExampleSource + ?Sized>(
    source: &S,
    folds: &[Vec<usize>],
    config: &ModelConfig,
    label_set: &[Label],
    seed: u64,
) -> Result<Vec<f64>, TrainError> {
    let mut scores = Vec::with_capacity(folds.len());
    for (f, held_out) in folds.iter().enumerate() {
        let mut train_rows: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        // corpus order, so training depends only on which rows are used
        train_rows.sort_unstable();
        let texts: Vec<&str> = train_rows.iter().map(|&r| source.text(r)).collect();
        let labels: Vec<Label> = train_rows.iter().map(|&r| source.label(r)).collect();
        let model = TrainedModel::train(&texts, &labels, config, seed)?;
        let eval_texts: Vec<&str> = held_out.iter().map(|&r| source.text(r)).collect();
        let truth: Vec<Label> = held_out.iter().map(|&r| source.label(r)).collect();
        let pred: Vec<Label> = predict(&model, &eval_texts).into_iter().map(|p| p.label).collect();
        let report = evaluate(&truth, &pred, label_set).expect("labels come from the label set");
        scores.push(report.macro_f1());
    }
    Ok(scores)
}

fn rank(a: &CellResult, b: &CellResult) -> Ordering {
    match (&a.error, &b.error) {
        (None, Some(_)) => return Ordering::Less,
        (Some(_), None) => return Ordering::Greater,
        _ => {}
    }
    b.mean_macro_f1
        .partial_cmp(&a.mean_macro_f1)
        .unwrap_or(Ordering::Equal)
        .then(a.config.n_hyperparameters().cmp(&b.config.n_hyperparameters()))
        .then(a.config.model.kind().cmp(&b.config.model.kind()))
        .then(a.config.vectorizer.cmp(&b.config.vectorizer))
        .then(a.index.cmp(&b.index))
}

/// Scores every cell by mean macro-F1 over the same stratified folds of the
/// split's train and validation rows, then refits the best cell on all of
/// them. Test rows are never read.
pub fn grid_search_cv<S: ExampleSource + ?Sized>(
    task: Task,
    source: &S,
    split: &SplitSpec,
    candidates: &[ModelConfig],
    folds: usize,
    seed: u64,
) -> Result<GridSearchOutcome, TrainError> {
    if candidates.is_empty() {
        return Err(TrainError::EmptyGrid);
    }
    let rows = split.non_test();
    let labels: Vec<Label> = rows.iter().map(|&r| source.label(r)).collect();
    if let Some(l) = labels.iter().find(|l| l.task() != task) {
        return Err(TrainError::UnknownLabel(*l));
    }
    let label_set: Vec<Label> = task.labels().iter().copied().filter(|l| labels.contains(l)).collect();
    let label_at = |r: usize| labels[rows.binary_search(&r).expect("row from the pool")];
    let fold_rows = stratified_folds(&rows, label_at, folds, seed)?;

    let mut ranked: Vec<CellResult> = candidates
        .iter()
        .enumerate()
        .map(|(index, config)| match evaluate_cell(source, &fold_rows, config, &label_set, seed) {
            Ok(fold_macro_f1) => CellResult {
                index,
                config: *config,
                mean_macro_f1: fold_macro_f1.iter().sum::<f64>() / fold_macro_f1.len() as f64,
                fold_macro_f1,
                error: None,
            },
            Err(e) => CellResult {
                index,
                config: *config,
                fold_macro_f1: Vec::new(),
                mean_macro_f1: f64::NAN,
                error: Some(e.to_string()),
            },
        })
        .collect();
    ranked.sort_by(rank);

    let best_cell = &ranked[0];
    if let Some(e) = &best_cell.error {
        return Err(TrainError::AllCellsFailed(e.clone()));
    }
    let texts: Vec<&str> = rows.iter().map(|&r| source.text(r)).collect();
    let best = TrainedModel::train(&texts, &labels, &best_cell.config, seed)?;
    Ok(GridSearchOutcome { ranked, best })
}
