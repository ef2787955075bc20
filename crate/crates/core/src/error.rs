use thiserror::Error;

use crate::{annotation, classifiers, config, corpus, evaluation, features, grid, predictions};

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Annotation(#[from] annotation::AnnotationError),
    #[error(transparent)]
    Features(#[from] features::FeatureError),
    #[error(transparent)]
    Training(#[from] classifiers::TrainError),
    #[error(transparent)]
    Evaluation(#[from] evaluation::EvalError),
    #[error(transparent)]
    Grid(#[from] grid::GridError),
    #[error(transparent)]
    Predictions(#[from] predictions::PredictionError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
