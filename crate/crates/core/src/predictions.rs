//! Versioned JSONL contract for sentence labels produced by any model.
//!
//! The first non-blank line is the header `{"schema":"genre-grid/predictions/v1"}`;
//! each following line is one [`PredictionRecord`].

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{argmax, Prediction, TrainedModel};
use crate::corpus::SentenceRecord;
use crate::grid::SentenceLabelPair;
use crate::jsonl;
use crate::labels::{Label, Task};

pub const SCHEMA: &str = "genre-grid/predictions/v1";

/// Tolerance on the score sum of probabilistic records.
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum PredictionError {
    #[error("cannot read predictions: {0}")]
    Io(String),
    #[error("missing or invalid schema header (expected {{\"schema\":\"{SCHEMA}\"}}): {0}")]
    Header(String),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: label `{label}` is outside the {task} domain")]
    Domain { line: usize, label: Label, task: Task },
    #[error("line {line}: label `{label}` is not the argmax of its scores")]
    Inconsistent { line: usize, label: Label },
    #[error("line {line}: probabilistic scores sum to {sum}")]
    NotNormalized { line: usize, sum: f64 },
    #[error("line {line}: duplicate ({sentence_id}, {task}, {model_id}), first seen on line {first_line}")]
    Duplicate {
        line: usize,
        first_line: usize,
        sentence_id: String,
        task: Task,
        model_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub sentence_id: String,
    pub task: Task,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<BTreeMap<Label, f64>>,
    pub model_id: String,
    /// Whether `scores` are probabilities that sum to one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilistic: Option<bool>,
}

impl PredictionRecord {
    pub fn from_prediction(sentence_id: &str, model: &TrainedModel, p: &Prediction, model_id: &str) -> Self {
        PredictionRecord {
            sentence_id: sentence_id.to_string(),
            task: model.task,
            label: p.label,
            scores: Some(model.label_set.iter().copied().zip(p.scores.iter().copied()).collect()),
            model_id: model_id.to_string(),
            probabilistic: Some(p.probabilistic),
        }
    }

    fn validate(&self, line: usize) -> Result<(), PredictionError> {
        if self.label.task() != self.task {
            return Err(PredictionError::Domain { line, label: self.label, task: self.task });
        }
        let Some(scores) = &self.scores else { return Ok(()) };
        if let Some(&bad) = scores.keys().find(|l| l.task() != self.task) {
            return Err(PredictionError::Domain { line, label: bad, task: self.task });
        }
        if scores.values().any(|v| !v.is_finite()) {
            return Err(PredictionError::Malformed { line, message: "non-finite score".into() });
        }
        let labels: Vec<Label> = scores.keys().copied().collect();
        let values: Vec<f64> = scores.values().copied().collect();
        let own = scores.get(&self.label).copied();
        let max = values.get(argmax(&values)).copied();
        if labels.is_empty() || own.is_none() || own < max {
            return Err(PredictionError::Inconsistent { line, label: self.label });
        }
        if self.probabilistic == Some(true) {
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE || values.iter().any(|&v| v < 0.0) {
                return Err(PredictionError::NotNormalized { line, sum });
            }
        }
        Ok(())
    }
}

/// Reads and validates a prediction stream; keeps only `task` when given.
pub fn read_predictions<R: BufRead>(reader: R, task: Option<Task>) -> Result<Vec<PredictionRecord>, PredictionError> {
    let mut lines = jsonl::numbered_lines(reader);
    let header = lines
        .next()
        .ok_or_else(|| PredictionError::Header("empty file".into()))?
        .map_err(|e| PredictionError::Io(e.to_string()))?;
    let parsed: serde_json::Value =
        serde_json::from_str(&header.text).map_err(|e| PredictionError::Header(e.to_string()))?;
    if parsed.get("schema").and_then(|s| s.as_str()) != Some(SCHEMA) {
        return Err(PredictionError::Header(header.text));
    }

    let mut seen: HashMap<(String, Task, String), usize> = HashMap::new();
    let mut out = Vec::new();
    for line in lines {
        let line = line.map_err(|e| PredictionError::Io(e.to_string()))?;
        let record: PredictionRecord = serde_json::from_str(&line.text).map_err(|e| PredictionError::Malformed {
            line: line.number,
            message: e.to_string(),
        })?;
        record.validate(line.number)?;
        let key = (record.sentence_id.clone(), record.task, record.model_id.clone());
        if let Some(&first_line) = seen.get(&key) {
            return Err(PredictionError::Duplicate {
                line: line.number,
                first_line,
                sentence_id: key.0,
                task: key.1,
                model_id: key.2,
            });
        }
        seen.insert(key, line.number);
        if task.is_none_or(|t| t == record.task) {
            out.push(record);
        }
    }
    Ok(out)
}

pub fn load_predictions(path: &Path, task: Option<Task>) -> Result<Vec<PredictionRecord>, PredictionError> {
    let file = File::open(path).map_err(|e| PredictionError::Io(format!("{}: {e}", path.display())))?;
    read_predictions(BufReader::new(file), task)
}

/// Writes the header line followed by one record per line.
pub fn write_predictions<W: Write>(mut writer: W, records: &[PredictionRecord]) -> std::io::Result<()> {
    serde_json::to_writer(&mut writer, &serde_json::json!({ "schema": SCHEMA }))?;
    writer.write_all(b"\n")?;
    jsonl::write_all(writer, records)
}

/// Per (sentence, task), keep `higher`'s record and fill gaps from `lower`.
/// Output is sorted by (sentence_id, task).
pub fn merge_records(higher: &[PredictionRecord], lower: &[PredictionRecord]) -> Vec<PredictionRecord> {
    let mut merged: BTreeMap<(&str, Task), &PredictionRecord> = BTreeMap::new();
    for r in lower.iter().rev() {
        merged.insert((&r.sentence_id, r.task), r);
    }
    for r in higher.iter().rev() {
        merged.insert((&r.sentence_id, r.task), r);
    }
    merged.into_values().cloned().collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub sentences: usize,
    pub covered: usize,
    pub missing_factuality: Vec<String>,
    pub missing_formality: Vec<String>,
    /// Records whose sentence_id is not in the sentence table.
    pub unknown_sentences: usize,
    /// Winning records per model_id.
    pub wins: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub pairs: Vec<SentenceLabelPair>,
    pub coverage: CoverageReport,
}

/// Resolves each sentence's two labels across sources.
///
/// Sources listed in `precedence` win in that order; unlisted model ids
/// follow in lexicographic order. Sentences lacking either label are
/// reported and left out of the pairs.
pub fn merge_sources(
    records: &[PredictionRecord],
    precedence: &[String],
    sentences: &[SentenceRecord],
) -> MergeOutcome {
    let mut by_model: BTreeMap<&str, Vec<PredictionRecord>> = BTreeMap::new();
    for r in records {
        by_model.entry(&r.model_id).or_default().push(r.clone());
    }
    let mut order: Vec<&str> = precedence
        .iter()
        .map(String::as_str)
        .filter(|m| by_model.contains_key(m))
        .collect();
    order.extend(by_model.keys().copied().filter(|m| !precedence.iter().any(|p| p == m)));

    let mut merged: Vec<PredictionRecord> = Vec::new();
    for m in order {
        merged = merge_records(&merged, &by_model[m]);
    }
    let lookup: HashMap<(&str, Task), &PredictionRecord> =
        merged.iter().map(|r| ((r.sentence_id.as_str(), r.task), r)).collect();
    let known: HashMap<&str, ()> = sentences.iter().map(|s| (s.sentence_id.as_str(), ())).collect();

    let mut coverage = CoverageReport {
        sentences: sentences.len(),
        unknown_sentences: merged.iter().filter(|r| !known.contains_key(r.sentence_id.as_str())).count(),
        ..Default::default()
    };
    let mut pairs = Vec::new();
    for s in sentences {
        let fact = lookup.get(&(s.sentence_id.as_str(), Task::Factuality));
        let form = lookup.get(&(s.sentence_id.as_str(), Task::Formality));
        if fact.is_none() {
            coverage.missing_factuality.push(s.sentence_id.clone());
        }
        if form.is_none() {
            coverage.missing_formality.push(s.sentence_id.clone());
        }
        if let (Some(f), Some(g)) = (fact, form) {
            coverage.covered += 1;
            *coverage.wins.entry(f.model_id.clone()).or_default() += 1;
            *coverage.wins.entry(g.model_id.clone()).or_default() += 1;
            pairs.push(SentenceLabelPair {
                sentence_id: s.sentence_id.clone(),
                item_id: s.item_id.clone(),
                position: s.position,
                factuality: f.label,
                formality: g.label,
            });
        }
    }
    MergeOutcome { pairs, coverage }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    fn with_header(lines: &[&str]) -> String {
        let mut s = format!("{{\"schema\":\"{SCHEMA}\"}}\n");
        for l in lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    #[test]
    fn accepts_consistent_record() {
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"factuality","label":"fact","scores":{"fact":0.9,"opinion":0.07,"neither":0.03},"model_id":"bert","probabilistic":true}"#,
        ]);
        let recs = read_predictions(data.as_bytes(), None).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].label, Fact);
    }

    #[test]
    fn domain_error() {
        let data = with_header(&[r#"{"sentence_id":"s1","task":"factuality","label":"formal","model_id":"m"}"#]);
        assert_eq!(
            read_predictions(data.as_bytes(), None),
            Err(PredictionError::Domain { line: 2, label: Formal, task: Task::Factuality })
        );
    }

    #[test]
    fn argmax_mismatch() {
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"factuality","label":"fact","scores":{"fact":0.2,"opinion":0.7,"neither":0.1},"model_id":"m"}"#,
        ]);
        assert_eq!(
            read_predictions(data.as_bytes(), None),
            Err(PredictionError::Inconsistent { line: 2, label: Fact })
        );
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"formality","label":"formal","scores":{"formal":0.9,"informal":0.2},"model_id":"m","probabilistic":true}"#,
        ]);
        assert!(matches!(read_predictions(data.as_bytes(), None), Err(PredictionError::NotNormalized { line: 2, .. })));
        // margins are fine when not flagged probabilistic
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"formality","label":"formal","scores":{"formal":0.9,"informal":-3.0},"model_id":"svm"}"#,
        ]);
        assert!(read_predictions(data.as_bytes(), None).is_ok());
    }

    #[test]
    fn header_and_duplicates() {
        let no_header = r#"{"sentence_id":"s1","task":"formality","label":"formal","model_id":"m"}"#;
        assert!(matches!(read_predictions(no_header.as_bytes(), None), Err(PredictionError::Header(_))));
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"formality","label":"formal","model_id":"m"}"#,
            r#"{"sentence_id":"s1","task":"factuality","label":"fact","model_id":"m"}"#,
            r#"{"sentence_id":"s1","task":"formality","label":"informal","model_id":"m"}"#,
        ]);
        assert!(matches!(
            read_predictions(data.as_bytes(), None),
            Err(PredictionError::Duplicate { line: 4, first_line: 2, .. })
        ));
    }

    #[test]
    fn task_filter() {
        let data = with_header(&[
            r#"{"sentence_id":"s1","task":"formality","label":"formal","model_id":"m"}"#,
            r#"{"sentence_id":"s1","task":"factuality","label":"fact","model_id":"m"}"#,
        ]);
        assert_eq!(read_predictions(data.as_bytes(), Some(Task::Formality)).unwrap().len(), 1);
    }

    #[test]
    fn byte_identical_reserialization() {
        let lines = [
            r#"{"sentence_id":"s1","task":"factuality","label":"fact","scores":{"fact":0.9,"opinion":0.07,"neither":0.03},"model_id":"bert","probabilistic":true}"#,
            r#"{"sentence_id":"s2","task":"formality","label":"informal","model_id":"baseline"}"#,
        ];
        let data = with_header(&lines);
        let recs = read_predictions(data.as_bytes(), None).unwrap();
        let mut out = Vec::new();
        write_predictions(&mut out, &recs).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), data);
    }

    fn rec(sid: &str, task: Task, label: Label, model: &str) -> PredictionRecord {
        PredictionRecord {
            sentence_id: sid.into(),
            task,
            label,
            scores: None,
            model_id: model.into(),
            probabilistic: None,
        }
    }

    fn table(ids: &[&str]) -> Vec<SentenceRecord> {
        ids.iter().enumerate().map(|(i, id)| SentenceRecord {
            sentence_id: id.to_string(),
            item_id: "it".into(),
            position: i,
            text: "x".into(),
            word_count: 1,
        }).collect()
    }

    #[test]
    fn precedence_wins() {
        let recs = vec![
            rec("s1", Task::Factuality, Opinion, "baseline"),
            rec("s1", Task::Factuality, Fact, "bert"),
            rec("s1", Task::Formality, Formal, "baseline"),
        ];
        let out = merge_sources(&recs, &["bert".into(), "baseline".into()], &table(&["s1"]));
        assert_eq!(out.pairs[0].factuality, Fact);
        assert_eq!(out.pairs[0].formality, Formal);
        assert_eq!(out.coverage.wins["bert"], 1);
        let out = merge_sources(&recs, &["baseline".into()], &table(&["s1"]));
        assert_eq!(out.pairs[0].factuality, Opinion);
    }

    #[test]
    fn single_source_and_disjoint_union() {
        let recs = vec![rec("s1", Task::Factuality, Fact, "a"), rec("s1", Task::Formality, Informal, "a")];
        let out = merge_sources(&recs, &[], &table(&["s1"]));
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(merge_records(&recs, &[]), recs);

        let recs = vec![
            rec("s1", Task::Factuality, Fact, "a"),
            rec("s1", Task::Formality, Informal, "a"),
            rec("s2", Task::Factuality, Neither, "b"),
            rec("s2", Task::Formality, Formal, "b"),
        ];
        let out = merge_sources(&recs, &["a".into(), "b".into()], &table(&["s1", "s2", "s3"]));
        assert_eq!(out.coverage.covered, 2);
        assert_eq!(out.coverage.missing_factuality, vec!["s3".to_string()]);
        assert_eq!(out.pairs.len(), 2);
    }
}
