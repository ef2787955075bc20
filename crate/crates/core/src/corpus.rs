//! News items, sentence segmentation and the sentence filters.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::features::tokenize;
use crate::jsonl;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate item_id `{item_id}` on lines {first_line} and {second_line}")]
    DuplicateId {
        item_id: String,
        first_line: usize,
        second_line: usize,
    },
    #[error("corpus CSV is missing required column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("unknown corpus format `{0}` (expected jsonl or csv)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextKind {
    Spoken,
    Written,
}

impl fmt::Display for TextKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextKind::Spoken => "spoken",
            TextKind::Written => "written",
        })
    }
}

impl FromStr for TextKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spoken" => Ok(TextKind::Spoken),
            "written" => Ok(TextKind::Written),
            other => Err(format!("unknown text_kind `{other}`")),
        }
    }
}

/// One news item as collected from an outlet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsItem {
    pub item_id: String,
    pub outlet: String,
    /// Traditional genre label such as "TV satire".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genre_tag: Option<String>,
    pub text_kind: TextKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    /// Section or topic tag assigned by the outlet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    pub body: String,
}

/// A sentence with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub item_id: String,
    /// 0-based index among the item's segmented sentences.
    pub position: usize,
    pub text: String,
    /// Whitespace-token count.
    pub word_count: usize,
}

impl SentenceRecord {
    pub fn new(item_id: &str, position: usize, text: &str) -> Self {
        Self {
            sentence_id: format!("{item_id}:{position}"),
            item_id: item_id.to_string(),
            position,
            text: text.to_string(),
            word_count: text.split_whitespace().count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<NewsItem>, CorpusError> {
    let file = File::open(path)?;
    match format {
        CorpusFormat::Jsonl => read_corpus_jsonl(BufReader::new(file)),
        CorpusFormat::Csv => read_corpus_csv(file),
    }
}

pub fn read_corpus_jsonl<R: BufRead>(reader: R) -> Result<Vec<NewsItem>, CorpusError> {
    let mut items = Vec::new();
    for line in jsonl::numbered_lines(reader) {
        let line = line?;
        let item: NewsItem = serde_json::from_str(&line.text).map_err(|e| {
            CorpusError::Malformed {
                line: line.number,
                message: e.to_string(),
            }
        })?;
        items.push((line.number, item));
    }
    finish(items)
}

pub fn read_corpus_csv<R: Read>(reader: R) -> Result<Vec<NewsItem>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Malformed { line: 1, message: e.to_string() })?
        .clone();
    let missing: Vec<String> = ["item_id", "outlet", "text_kind", "body"]
        .iter()
        .filter(|c| !headers.iter().any(|h| h == **c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::MissingColumns(missing));
    }
    let mut items = Vec::new();
    for record in rdr.deserialize::<NewsItem>() {
        let item = record.map_err(|e| CorpusError::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        // csv only knows the line after the fact; count items instead (header is line 1).
        let line = items.len() + 2;
        items.push((line, blank_to_none(item)));
    }
    finish(items)
}

fn blank_to_none(mut item: NewsItem) -> NewsItem {
    for field in [&mut item.genre_tag, &mut item.date, &mut item.section] {
        if field.as_deref().is_some_and(|s| s.trim().is_empty()) {
            *field = None;
        }
    }
    item
}

fn finish(items: Vec<(usize, NewsItem)>) -> Result<Vec<NewsItem>, CorpusError> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(items.len());
    for (line, item) in items {
        if item.item_id.trim().is_empty() {
            return Err(CorpusError::Malformed { line, message: "empty item_id".into() });
        }
        if item.body.trim().is_empty() {
            return Err(CorpusError::Malformed { line, message: "empty body".into() });
        }
        if let Some(&first_line) = seen.get(&item.item_id) {
            return Err(CorpusError::DuplicateId {
                item_id: item.item_id,
                first_line,
                second_line: line,
            });
        }
        seen.insert(item.item_id.clone(), line);
        out.push(item);
    }
    Ok(out)
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | '”' | '’' | ')' | ']' | '»')
}

fn is_opening(c: char) -> bool {
    matches!(c, '"' | '\'' | '“' | '‘' | '„' | '«' | '(' | '[')
}

/// Splits an item body into sentences.
///
/// A run of `.`, `!` or `?` (plus any closing quotes) ends a sentence when it
/// is followed by whitespace and then an uppercase letter or an opening
/// quote, unless the run is a single `.` closing a token from
/// `abbreviations` (compared case-insensitively). A blank line always ends
/// a sentence, and so does the end of the body.
pub fn segment_item(item: &NewsItem, abbreviations: &[String]) -> Vec<SentenceRecord> {
    let abbrev: HashSet<String> = abbreviations.iter().map(|a| a.to_lowercase()).collect();
    split_sentences(&item.body, &abbrev)
        .into_iter()
        .enumerate()
        .map(|(pos, text)| SentenceRecord::new(&item.item_id, pos, text))
        .collect()
}

fn split_sentences<'a>(body: &'a str, abbrev: &HashSet<String>) -> Vec<&'a str> {
    let chars: Vec<(usize, char)> = body.char_indices().collect();
    let n = chars.len();
    let byte_at = |i: usize| if i < n { chars[i].0 } else { body.len() };
    let mut out = Vec::new();
    let mut start = 0usize;
    let push = |from: usize, to: usize, out: &mut Vec<&'a str>| {
        if from >= to {
            return;
        }
        let s = body[byte_at(from)..byte_at(to)].trim();
        if !s.is_empty() {
            out.push(s);
        }
    };

    let mut i = 0usize;
    while i < n {
        let c = chars[i].1;
        if c == '\n' {
            // a blank line (only whitespace between two newlines) is a hard break
            let mut k = i + 1;
            let mut newlines = 1;
            while k < n && chars[k].1.is_whitespace() {
                if chars[k].1 == '\n' {
                    newlines += 1;
                }
                k += 1;
            }
            if newlines >= 2 {
                push(start, i, &mut out);
                start = k;
                i = k;
                continue;
            }
            i += 1;
            continue;
        }
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < n && is_terminator(chars[end].1) {
            end += 1;
        }
        let single_dot = end == i + 1 && c == '.';
        while end < n && is_closing(chars[end].1) {
            end += 1;
        }
        let mut next = end;
        while next < n && chars[next].1.is_whitespace() {
            next += 1;
        }
        let followed_by_space = next > end;
        let starts_sentence =
            next < n && (chars[next].1.is_uppercase() || is_opening(chars[next].1));
        if followed_by_space && starts_sentence {
            let is_abbrev = single_dot && {
                let mut tok_start = i;
                while tok_start > start && !chars[tok_start - 1].1.is_whitespace() {
                    tok_start -= 1;
                }
                let token = body[byte_at(tok_start)..byte_at(i + 1)]
                    .trim_start_matches(is_opening)
                    .to_lowercase();
                abbrev.contains(&token)
            };
            if !is_abbrev {
                push(start, end, &mut out);
                start = next;
            }
        }
        i = end.max(i + 1);
    }
    push(start, n, &mut out);
    out
}

/// Why a sentence was kept or dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterDecision {
    Kept,
    TooShort,
    TooLong,
    SourceLeak,
}

impl FilterDecision {
    pub fn is_kept(self) -> bool {
        self == FilterDecision::Kept
    }
}

/// Case-insensitive, token-level matcher for source-revealing terms.
///
/// Multi-word terms match as contiguous token sequences.
#[derive(Debug, Clone, Default)]
pub struct LeakMatcher {
    patterns: Vec<Vec<String>>,
}

impl LeakMatcher {
    pub fn new<S: AsRef<str>>(terms: &[S]) -> Self {
        let patterns = terms
            .iter()
            .map(|t| tokenize(t.as_ref(), true))
            .filter(|p| !p.is_empty())
            .collect();
        Self { patterns }
    }

    pub fn matches(&self, text: &str) -> bool {
        if self.patterns.is_empty() {
            return false;
        }
        let tokens = tokenize(text, true);
        self.patterns
            .iter()
            .any(|p| tokens.windows(p.len()).any(|w| w == p.as_slice()))
    }
}

/// Word-count bounds, both inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBounds {
    pub min: usize,
    pub max: usize,
}

impl Default for WordBounds {
    fn default() -> Self {
        Self {
            min: crate::config::DEFAULT_MIN_WORDS,
            max: crate::config::DEFAULT_MAX_WORDS,
        }
    }
}

pub fn filter_sentence(s: &SentenceRecord, leaks: &LeakMatcher, bounds: WordBounds) -> FilterDecision {
    if s.word_count < bounds.min {
        FilterDecision::TooShort
    } else if s.word_count > bounds.max {
        FilterDecision::TooLong
    } else if leaks.matches(&s.text) {
        FilterDecision::SourceLeak
    } else {
        FilterDecision::Kept
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub items: usize,
    pub segmented: usize,
    pub kept: usize,
    pub too_short: usize,
    pub too_long: usize,
    pub source_leak: usize,
}

impl FilterStats {
    fn record(&mut self, d: FilterDecision) {
        self.segmented += 1;
        match d {
            FilterDecision::Kept => self.kept += 1,
            FilterDecision::TooShort => self.too_short += 1,
            FilterDecision::TooLong => self.too_long += 1,
            FilterDecision::SourceLeak => self.source_leak += 1,
        }
    }
}

/// Segments and filters every item, returning the kept sentences in corpus order.
pub fn build_sentence_table(
    items: &[NewsItem],
    config: &PipelineConfig,
) -> (Vec<SentenceRecord>, FilterStats) {
    let leaks = LeakMatcher::new(&config.all_leak_terms());
    let bounds = WordBounds { min: config.min_words, max: config.max_words };
    let mut stats = FilterStats { items: items.len(), ..Default::default() };
    let mut kept = Vec::new();
    for item in items {
        for s in segment_item(item, &config.abbreviations) {
            let d = filter_sentence(&s, &leaks, bounds);
            stats.record(d);
            if d.is_kept() {
                kept.push(s);
            }
        }
    }
    (kept, stats)
}

pub fn read_sentences<R: BufRead>(reader: R) -> Result<Vec<SentenceRecord>, CorpusError> {
    jsonl::read_all(reader).map_err(|e| CorpusError::Malformed { line: e.line, message: e.message })
}

pub fn load_sentences(path: &Path) -> Result<Vec<SentenceRecord>, CorpusError> {
    read_sentences(BufReader::new(File::open(path)?))
}
