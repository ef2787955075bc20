//! Baseline sentence classifiers: multinomial naive Bayes, softmax logistic
//! regression and a one-vs-rest linear SVM, with stratified splitting and
//! cross-validated grid search.

mod grid_search;
pub mod logistic;
pub mod naive_bayes;
mod split;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{SparseVector, Vocabulary};
use crate::labels::{Label, Task};

pub use grid_search::{default_grid, grid_search_cv, CellResult, ExampleSource, GridSearchOutcome, LabeledSentences};
pub use logistic::{train_logistic_regression, LogisticConfig};
pub use naive_bayes::train_naive_bayes;
pub use split::{stratified_folds, stratified_split, SplitRatios, SplitSpec};
pub use svm::train_linear_svm;

/// Version of the model file layout.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{vectors} feature vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("labels from more than one task in the training set")]
    MixedTasks,
    #[error("naive Bayes smoothing must be positive, got {0}")]
    InvalidSmoothing(f64),
    #[error("naive Bayes needs nonnegative features")]
    NegativeFeature,
    #[error("SVM regularization must be positive, got {0}")]
    InvalidRegularization(f64),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("logistic regression diverged (non-finite loss) with learning rate {lr}")]
    Diverged { lr: f64 },
    #[error("class `{0}` has no examples")]
    EmptyClass(Label),
    #[error("label `{0}` is not in the label set")]
    UnknownLabel(Label),
    #[error("cannot split {n} examples into {folds} folds")]
    TooFewExamples { n: usize, folds: usize },
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("every grid cell failed; first error: {0}")]
    AllCellsFailed(String),
    #[error(transparent)]
    Features(#[from] crate::features::FeatureError),
    #[error("invalid model file: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    NaiveBayes,
    LogisticRegression,
    LinearSvm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::LinearSvm => "linear_svm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorizerKind {
    Counts,
    Tfidf,
}

impl fmt::Display for VectorizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorizerKind::Counts => "counts",
            VectorizerKind::Tfidf => "tfidf",
        })
    }
}

impl FromStr for VectorizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "counts" => Ok(VectorizerKind::Counts),
            "tfidf" => Ok(VectorizerKind::Tfidf),
            other => Err(format!("unknown vectorizer `{other}`")),
        }
    }
}

impl VectorizerKind {
    pub fn transform(self, vocab: &Vocabulary, text: &str) -> SparseVector {
        match self {
            VectorizerKind::Counts => vocab.transform_counts(text),
            VectorizerKind::Tfidf => vocab.transform_tfidf(text),
        }
    }
}

/// Model family together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_kind", rename_all = "snake_case")]
pub enum ModelSpec {
    NaiveBayes { smoothing: f64 },
    LogisticRegression(LogisticConfig),
    LinearSvm { reg: f64, epochs: usize },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::NaiveBayes { .. } => ModelKind::NaiveBayes,
            ModelSpec::LogisticRegression(_) => ModelKind::LogisticRegression,
            ModelSpec::LinearSvm { .. } => ModelKind::LinearSvm,
        }
    }

    /// Number of tunable hyperparameters of the family.
    pub fn n_hyperparameters(&self) -> usize {
        match self {
            ModelSpec::NaiveBayes { .. } => 1,
            ModelSpec::LinearSvm { .. } => 2,
            ModelSpec::LogisticRegression(_) => 3,
        }
    }
}

/// One grid cell: vectorizer settings plus a model specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vectorizer: VectorizerKind,
    pub min_df: u32,
    #[serde(flatten)]
    pub model: ModelSpec,
}

impl ModelConfig {
    pub fn n_hyperparameters(&self) -> usize {
        self.model.n_hyperparameters() + 1
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = match self.vectorizer {
            VectorizerKind::Counts => "counts",
            VectorizerKind::Tfidf => "tfidf",
        };
        match self.model {
            ModelSpec::NaiveBayes { smoothing } => {
                write!(f, "naive_bayes(smoothing={smoothing}) {vec} min_df={}", self.min_df)
            }
            ModelSpec::LogisticRegression(c) => write!(
                f,
                "logistic_regression(l2={}, lr={}, epochs={}) {vec} min_df={}",
                c.l2, c.lr, c.epochs, self.min_df
            ),
            ModelSpec::LinearSvm { reg, epochs } => {
                write!(f, "linear_svm(reg={reg}, epochs={epochs}) {vec} min_df={}", self.min_df)
            }
        }
    }
}

/// Learned weights, one row per class in `label_set` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParameters {
    NaiveBayes {
        class_log_prior: Vec<f64>,
        feature_log_prob: Vec<Vec<f64>>,
    },
    LogisticRegression { weights: Vec<Vec<f64>>, bias: Vec<f64> },
    LinearSvm { weights: Vec<Vec<f64>>, bias: Vec<f64> },
}

impl ModelParameters {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParameters::NaiveBayes { .. } => ModelKind::NaiveBayes,
            ModelParameters::LogisticRegression { .. } => ModelKind::LogisticRegression,
            ModelParameters::LinearSvm { .. } => ModelKind::LinearSvm,
        }
    }

    fn shape(&self) -> (usize, Vec<usize>) {
        match self {
            ModelParameters::NaiveBayes { class_log_prior, feature_log_prob } => {
                (class_log_prior.len(), feature_log_prob.iter().map(Vec::len).collect())
            }
            ModelParameters::LogisticRegression { weights, bias }
            | ModelParameters::LinearSvm { weights, bias } => {
                (bias.len(), weights.iter().map(Vec::len).collect())
            }
        }
    }
}

/// A classifier over feature vectors, without a vectorizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub label_set: Vec<Label>,
    pub parameters: ModelParameters,
}

impl Classifier {
    /// Per-class scores: posteriors (NB), softmax probabilities (LR) or raw margins (SVM).
    pub fn scores(&self, x: &SparseVector) -> Vec<f64> {
        match &self.parameters {
            ModelParameters::NaiveBayes { class_log_prior, feature_log_prob } => {
                let joint: Vec<f64> = class_log_prior
                    .iter()
                    .zip(feature_log_prob)
                    .map(|(p, row)| p + x.dot(row))
                    .collect();
                softmax(&joint)
            }
            ModelParameters::LogisticRegression { weights, bias } => {
                softmax(&linear_scores(weights, bias, x))
            }
            ModelParameters::LinearSvm { weights, bias } => linear_scores(weights, bias, x),
        }
    }

    pub fn is_probabilistic(&self) -> bool {
        !matches!(self.parameters, ModelParameters::LinearSvm { .. })
    }

    pub fn predict_vector(&self, x: &SparseVector) -> Label {
        self.label_set[argmax(&self.scores(x))]
    }
}

pub(crate) fn linear_scores(weights: &[Vec<f64>], bias: &[f64], x: &SparseVector) -> Vec<f64> {
    weights.iter().zip(bias).map(|(w, b)| x.dot(w) + b).collect()
}

/// Numerically stable softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Index of the first maximal score, so ties go to the earlier label.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Sorted distinct labels, plus each example's index into them.
pub(crate) fn encode_labels(y: &[Label]) -> Result<(Vec<Label>, Vec<usize>), TrainError> {
    if y.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let task = y[0].task();
    if y.iter().any(|l| l.task() != task) {
        return Err(TrainError::MixedTasks);
    }
    let mut label_set: Vec<Label> = y.to_vec();
    label_set.sort();
    label_set.dedup();
    let codes = y
        .iter()
        .map(|l| label_set.binary_search(l).expect("label present"))
        .collect();
    Ok((label_set, codes))
}

pub(crate) fn check_inputs(x: &[SparseVector], y: &[Label]) -> Result<usize, TrainError> {
    if x.len() != y.len() {
        return Err(TrainError::LengthMismatch { vectors: x.len(), labels: y.len() });
    }
    if x.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    Ok(x[0].dim)
}

/// Per-sentence prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: Label,
    /// Aligned with the model's `label_set`.
    pub scores: Vec<f64>,
    pub probabilistic: bool,
}

/// Vectorizer, vocabulary and classifier for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub task: Task,
    pub model_kind: ModelKind,
    pub vectorizer_kind: VectorizerKind,
    pub vocabulary: Vocabulary,
    pub label_set: Vec<Label>,
    pub parameters: ModelParameters,
    pub hyperparameters: ModelConfig,
    pub training_seed: u64,
}

impl TrainedModel {
    pub fn train<S: AsRef<str>>(
        texts: &[S],
        labels: &[Label],
        config: &ModelConfig,
        seed: u64,
    ) -> Result<Self, TrainError> {
        if texts.len() != labels.len() {
            return Err(TrainError::LengthMismatch { vectors: texts.len(), labels: labels.len() });
        }
        let vocabulary = Vocabulary::fit(texts, config.min_df, true)?;
        let x: Vec<SparseVector> = texts
            .iter()
            .map(|t| config.vectorizer.transform(&vocabulary, t.as_ref()))
            .collect();
        let classifier = fit_classifier(&x, labels, &config.model, seed)?;
        Ok(TrainedModel {
            format_version: MODEL_FORMAT_VERSION,
            task: labels[0].task(),
            model_kind: config.model.kind(),
            vectorizer_kind: config.vectorizer,
            vocabulary,
            label_set: classifier.label_set,
            parameters: classifier.parameters,
            hyperparameters: *config,
            training_seed: seed,
        })
    }

    pub fn vectorize(&self, text: &str) -> SparseVector {
        self.vectorizer_kind.transform(&self.vocabulary, text)
    }

    fn classifier(&self) -> Classifier {
        Classifier { label_set: self.label_set.clone(), parameters: self.parameters.clone() }
    }

    pub fn predict_one(&self, text: &str) -> Prediction {
        let classifier = self.classifier();
        predict_with(&classifier, &self.vectorize(text))
    }

    /// Checks dimensions and metadata after deserialization.
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::InvalidModel(m));
        if self.format_version != MODEL_FORMAT_VERSION {
            return bad(format!("unsupported format_version {}", self.format_version));
        }
        if self.parameters.kind() != self.model_kind || self.hyperparameters.model.kind() != self.model_kind {
            return bad("model_kind disagrees with parameters".into());
        }
        if self.label_set.is_empty() || self.label_set.iter().any(|l| l.task() != self.task) {
            return bad("label_set does not match task".into());
        }
        let (k, rows) = self.parameters.shape();
        if k != self.label_set.len() || rows.len() != k || rows.iter().any(|&r| r != self.vocabulary.len()) {
            return bad("parameter dimensions do not match vocabulary and label_set".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TrainError> {
        let model: TrainedModel =
            serde_json::from_str(s).map_err(|e| TrainError::InvalidModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self, TrainError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TrainError::InvalidModel(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn predict_with(classifier: &Classifier, x: &SparseVector) -> Prediction {
    let scores = classifier.scores(x);
    Prediction {
        label: classifier.label_set[argmax(&scores)],
        scores,
        probabilistic: classifier.is_probabilistic(),
    }
}

pub fn fit_classifier(
    x: &[SparseVector],
    y: &[Label],
    spec: &ModelSpec,
    seed: u64,
) -> Result<Classifier, TrainError> {
    match *spec {
        ModelSpec::NaiveBayes { smoothing } => train_naive_bayes(x, y, smoothing),
        ModelSpec::LogisticRegression(cfg) => train_logistic_regression(x, y, &cfg, seed),
        ModelSpec::LinearSvm { reg, epochs } => train_linear_svm(x, y, reg, epochs, seed),
    }
}

/// Labels and scores for a batch of sentences.
pub fn predict<S: AsRef<str>>(model: &TrainedModel, sentences: &[S]) -> Vec<Prediction> {
    let classifier = model.classifier();
    sentences
        .iter()
        .map(|s| predict_with(&classifier, &model.vectorize(s.as_ref())))
        .collect()
}
