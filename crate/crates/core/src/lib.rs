//! Sentence-level factuality and formality classification, annotation
//! consolidation, and two-dimensional genre grids for news content.
//!
//! The pipeline is file-oriented:
//!
//! 1. [`corpus`] ingests news items, segments them into sentences and applies
//!    the length and source-leak filters.
//! 2. [`annotation`] turns multi-rater labels into gold labels and measures
//!    inter-coder reliability with Krippendorff's alpha.
//! 3. [`features`] and [`classifiers`] train the baseline models;
//!    [`evaluation`] scores them.
//! 4. [`predictions`] imports labels produced elsewhere (for example by a
//!    fine-tuned transformer) through a versioned JSONL contract.
//! 5. [`grid`] positions items, outlets and sections on the
//!    factuality × formality plane and renders SVG plots.

pub mod annotation;
pub mod classifiers;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod features;
pub mod grid;
pub mod jsonl;
pub mod labels;
pub mod predictions;

mod error;

pub use annotation::{
    AnnotationRecord, Consolidation, DiscardReport, GoldLabel, LikertMerge, RawLabel,
    ReliabilityMetric, ReliabilityReport,
};
pub use classifiers::{ModelKind, SplitSpec, TrainedModel, VectorizerKind};
pub use config::PipelineConfig;
pub use corpus::{FilterDecision, NewsItem, SentenceRecord, TextKind};
pub use error::Error;
pub use evaluation::EvaluationReport;
pub use features::{SparseVector, Vocabulary};
pub use grid::{GridPoint, SentenceLabelPair, UnitLevel, ZoomBounds};
pub use labels::{Label, Task};
pub use predictions::PredictionRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;
