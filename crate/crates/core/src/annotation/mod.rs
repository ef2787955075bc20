//! Gold labels from multi-rater annotations, and inter-coder reliability.

mod alpha;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonl;
use crate::labels::{Label, Task};

pub use alpha::{
    alpha_from_codes, krippendorff_alpha, CodedUnits, ReliabilityMetric, ReliabilityReport,
};

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("Likert value {0} is outside 1..=5")]
    LikertOutOfRange(i64),
    #[error("cannot take a majority vote over zero votes")]
    NoVotes,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("record for sentence `{sentence_id}` has task {found}, expected {expected}")]
    TaskMismatch {
        sentence_id: String,
        expected: Task,
        found: Task,
    },
    #[error("annotator `{annotator_id}` rated sentence `{sentence_id}` twice for {task}")]
    DuplicateRating {
        sentence_id: String,
        annotator_id: String,
        task: Task,
    },
    #[error("metric {metric} is not defined for task {task}")]
    MetricNotApplicable { task: Task, metric: ReliabilityMetric },
    #[error("need at least 2 units with 2 or more ratings, found {0}")]
    InsufficientData(usize),
    #[error("expected disagreement is zero (every pairable value is identical); alpha is undefined")]
    Degenerate,
    #[error("cannot read annotations: {0}")]
    Io(String),
}

/// A rater's answer before consolidation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum RawLabel {
    /// One of fact / opinion / neither.
    Category(Label),
    /// 1 = very informal … 5 = very formal.
    Likert(u8),
}

impl RawLabel {
    /// Parses a textual label in the domain of `task`.
    pub fn parse(task: Task, s: &str) -> Result<Self, String> {
        match task {
            Task::Factuality => Label::parse_for(task, s)
                .map(RawLabel::Category)
                .ok_or_else(|| format!("`{s}` is not a factuality label")),
            Task::Formality => {
                let v: i64 = s.trim().parse().map_err(|_| format!("`{s}` is not a 1..5 formality rating"))?;
                if (1..=5).contains(&v) {
                    Ok(RawLabel::Likert(v as u8))
                } else {
                    Err(format!("formality rating {v} is outside 1..5"))
                }
            }
        }
    }

    pub fn task(self) -> Task {
        match self {
            RawLabel::Category(l) => l.task(),
            RawLabel::Likert(_) => Task::Formality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationRecord {
    pub sentence_id: String,
    pub annotator_id: String,
    pub task: Task,
    pub raw_label: RawLabel,
}

#[derive(Deserialize)]
struct AnnotationRow {
    sentence_id: String,
    annotator_id: String,
    task: Task,
    raw_label: serde_json::Value,
}

impl AnnotationRow {
    fn validate(self) -> Result<AnnotationRecord, String> {
        let text = match &self.raw_label {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(format!("raw_label must be a string or integer, got {other}")),
        };
        Ok(AnnotationRecord {
            raw_label: RawLabel::parse(self.task, &text)?,
            sentence_id: self.sentence_id,
            annotator_id: self.annotator_id,
            task: self.task,
        })
    }
}

pub fn read_annotations_jsonl<R: BufRead>(reader: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut out = Vec::new();
    for line in jsonl::numbered_lines(reader) {
        let line = line.map_err(|e| AnnotationError::Io(e.to_string()))?;
        let row: AnnotationRow = serde_json::from_str(&line.text).map_err(|e| AnnotationError::Malformed {
            line: line.number,
            message: e.to_string(),
        })?;
        out.push(row.validate().map_err(|message| AnnotationError::Malformed { line: line.number, message })?);
    }
    Ok(out)
}

pub fn read_annotations_csv<R: Read>(reader: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    #[derive(Deserialize)]
    struct CsvRow {
        sentence_id: String,
        annotator_id: String,
        task: Task,
        raw_label: String,
    }
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| AnnotationError::Malformed { line, message: e.to_string() })?;
        let raw_label = RawLabel::parse(row.task, &row.raw_label)
            .map_err(|message| AnnotationError::Malformed { line, message })?;
        out.push(AnnotationRecord {
            sentence_id: row.sentence_id,
            annotator_id: row.annotator_id,
            task: row.task,
            raw_label,
        });
    }
    Ok(out)
}

/// Loads annotations; `.csv` files are read as CSV, everything else as JSONL.
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let file = File::open(path).map_err(|e| AnnotationError::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        read_annotations_csv(file)
    } else {
        read_annotations_jsonl(BufReader::new(file))
    }
}

/// Outcome of collapsing the 5-point formality scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LikertMerge {
    Informal,
    Formal,
    Discarded,
}

impl LikertMerge {
    pub fn label(self) -> Option<Label> {
        match self {
            LikertMerge::Informal => Some(Label::Informal),
            LikertMerge::Formal => Some(Label::Formal),
            LikertMerge::Discarded => None,
        }
    }
}

/// 1–2 → informal, 4–5 → formal, 3 (neutral) → discarded.
pub fn merge_likert(raw: i64) -> Result<LikertMerge, AnnotationError> {
    match raw {
        1 | 2 => Ok(LikertMerge::Informal),
        3 => Ok(LikertMerge::Discarded),
        4 | 5 => Ok(LikertMerge::Formal),
        other => Err(AnnotationError::LikertOutOfRange(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VoteOutcome<L> {
    Winner { label: L, margin: u32 },
    Tied,
}

/// Strict plurality vote. Any tie for first place is [`VoteOutcome::Tied`].
/// The margin is the winner's count minus the runner-up's (0 if none).
pub fn majority_vote<L: Ord + Clone>(votes: &[L]) -> Result<VoteOutcome<L>, AnnotationError> {
    if votes.is_empty() {
        return Err(AnnotationError::NoVotes);
    }
    let mut counts: BTreeMap<&L, u32> = BTreeMap::new();
    for v in votes {
        *counts.entry(v).or_insert(0) += 1;
    }
    let mut ranked: Vec<(&L, u32)> = counts.into_iter().collect();
    ranked.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
    let (top, top_count) = ranked[0];
    let runner_up = ranked.get(1).map_or(0, |r| r.1);
    if runner_up == top_count {
        return Ok(VoteOutcome::Tied);
    }
    Ok(VoteOutcome::Winner {
        label: top.clone(),
        margin: top_count - runner_up,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub sentence_id: String,
    pub task: Task,
    pub label: Label,
    pub vote_margin: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardReport {
    pub tied: usize,
    pub all_neutral: usize,
    pub too_few_votes: usize,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Consolidation {
    pub gold: Vec<GoldLabel>,
    pub report: DiscardReport,
}

impl Consolidation {
    /// Share of each label among gold sentences, in the task's label order.
    pub fn class_shares(&self, task: Task) -> Vec<(Label, f64)> {
        let n = self.gold.len().max(1) as f64;
        task.labels()
            .iter()
            .map(|&l| (l, self.gold.iter().filter(|g| g.label == l).count() as f64 / n))
            .collect()
    }
}

/// Minimum usable votes for a gold label.
pub const MIN_VOTES: usize = 2;

/// Groups ratings by sentence (first-appearance order) after checking
/// task membership and (sentence, annotator) uniqueness.
pub(crate) fn group_by_sentence(
    records: &[AnnotationRecord],
    task: Task,
) -> Result<Vec<(&str, Vec<&AnnotationRecord>)>, AnnotationError> {
    let mut order: Vec<(&str, Vec<&AnnotationRecord>)> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for r in records {
        if r.task != task || r.raw_label.task() != task {
            return Err(AnnotationError::TaskMismatch {
                sentence_id: r.sentence_id.clone(),
                expected: task,
                found: if r.task != task { r.task } else { r.raw_label.task() },
            });
        }
        if !seen.insert((&r.sentence_id, &r.annotator_id)) {
            return Err(AnnotationError::DuplicateRating {
                sentence_id: r.sentence_id.clone(),
                annotator_id: r.annotator_id.clone(),
                task,
            });
        }
        let idx = *slot.entry(&r.sentence_id).or_insert_with(|| {
            order.push((&r.sentence_id, Vec::new()));
            order.len() - 1
        });
        order[idx].1.push(r);
    }
    Ok(order)
}

/// Turns ratings into gold labels.
///
/// Formality ratings are merged to informal/formal before voting and neutral
/// votes are dropped. A sentence needs at least [`MIN_VOTES`] usable votes and
/// a strict plurality winner.
pub fn consolidate(records: &[AnnotationRecord], task: Task) -> Result<Consolidation, AnnotationError> {
    let mut gold = Vec::new();
    let mut report = DiscardReport::default();
    for (sentence_id, ratings) in group_by_sentence(records, task)? {
        let mut votes = Vec::with_capacity(ratings.len());
        for r in &ratings {
            match r.raw_label {
                RawLabel::Category(l) => votes.push(l),
                RawLabel::Likert(v) => {
                    if let Some(l) = merge_likert(v as i64)?.label() {
                        votes.push(l);
                    }
                }
            }
        }
        if votes.is_empty() && task == Task::Formality {
            report.all_neutral += 1;
            continue;
        }
        if votes.len() < MIN_VOTES {
            report.too_few_votes += 1;
            continue;
        }
        match majority_vote(&votes)? {
            VoteOutcome::Tied => report.tied += 1,
            VoteOutcome::Winner { label, margin } => {
                report.kept += 1;
                gold.push(GoldLabel {
                    sentence_id: sentence_id.to_string(),
                    task,
                    label,
                    vote_margin: margin,
                });
            }
        }
    }
    Ok(Consolidation { gold, report })
}

pub fn read_gold<R: BufRead>(reader: R) -> Result<Vec<GoldLabel>, AnnotationError> {
    jsonl::read_all(reader).map_err(|e| AnnotationError::Malformed { line: e.line, message: e.message })
}

pub fn load_gold(path: &Path) -> Result<Vec<GoldLabel>, AnnotationError> {
    let file = File::open(path).map_err(|e| AnnotationError::Io(format!("{}: {e}", path.display())))?;
    read_gold(BufReader::new(file))
}
