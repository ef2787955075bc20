//! Positions items, outlets and sections on the factuality × formality grid.
//!
//! A unit's coordinates are class fractions of its sentences: the share
//! labeled `fact` on the x-axis and the share labeled `formal` on the y-axis.

mod hull;
mod render;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{NewsItem, TextKind};
use crate::labels::Label;

pub use hull::convex_hull;
pub use render::{render_grid, RenderOptions, RenderedGrid};

/// Default number of leading sentences used per item.
pub const DEFAULT_CAP: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("item `{0}` has no labeled sentences")]
    NoSentences(String),
    #[error("item(s) not mapped to any group: {}", .0.join(", "))]
    Unmapped(Vec<String>),
    #[error("zoom bounds need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("sentence `{sentence_id}` has a {found} label where a {expected} label is required")]
    WrongAxis {
        sentence_id: String,
        expected: &'static str,
        found: Label,
    },
    #[error("grid CSV: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceLabelPair {
    pub sentence_id: String,
    pub item_id: String,
    pub position: usize,
    pub factuality: Label,
    pub formality: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitLevel {
    Item,
    Outlet,
    Section,
}

impl fmt::Display for UnitLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitLevel::Item => "item",
            UnitLevel::Outlet => "outlet",
            UnitLevel::Section => "section",
        })
    }
}

impl FromStr for UnitLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "item" => Ok(UnitLevel::Item),
            "outlet" => Ok(UnitLevel::Outlet),
            "section" => Ok(UnitLevel::Section),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

/// Denominator of the factuality coordinate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactualityAxis {
    /// fact / (fact + opinion + neither)
    #[default]
    AllSentences,
    /// fact / (fact + opinion); `neither` sentences are ignored on this axis.
    FactVsOpinion,
}

impl FromStr for FactualityAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "all-sentences" => Ok(FactualityAxis::AllSentences),
            "fact-vs-opinion" => Ok(FactualityAxis::FactVsOpinion),
            other => Err(format!("unknown factuality axis `{other}`")),
        }
    }
}

/// How member items combine into a group point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Fractions over all pooled sentences of the group.
    #[default]
    Pooled,
    /// Unweighted mean of the member items' fractions.
    ItemMean,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(Aggregation::Pooled),
            "item-mean" => Ok(Aggregation::ItemMean),
            other => Err(format!("unknown aggregation `{other}`")),
        }
    }
}

/// Sentence counts per class for one unit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub fact: usize,
    pub opinion: usize,
    pub neither: usize,
    pub formal: usize,
    pub n: usize,
}

impl LabelCounts {
    fn add(&mut self, p: &SentenceLabelPair) -> Result<(), GridError> {
        match p.factuality {
            Label::Fact => self.fact += 1,
            Label::Opinion => self.opinion += 1,
            Label::Neither => self.neither += 1,
            other => {
                return Err(GridError::WrongAxis {
                    sentence_id: p.sentence_id.clone(),
                    expected: "factuality",
                    found: other,
                })
            }
        }
        match p.formality {
            Label::Formal => self.formal += 1,
            Label::Informal => {}
            other => {
                return Err(GridError::WrongAxis {
                    sentence_id: p.sentence_id.clone(),
                    expected: "formality",
                    found: other,
                })
            }
        }
        self.n += 1;
        Ok(())
    }

    fn merge(&mut self, o: &LabelCounts) {
        self.fact += o.fact;
        self.opinion += o.opinion;
        self.neither += o.neither;
        self.formal += o.formal;
        self.n += o.n;
    }
}

/// Display attributes used for colour and marker shape.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitDisplay {
    pub genre_tag: Option<String>,
    pub text_kind: Option<TextKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub unit_id: String,
    pub level: UnitLevel,
    pub n_sentences: usize,
    pub frac_fact: f64,
    pub frac_opinion: f64,
    pub frac_neither: f64,
    pub frac_formal: f64,
    pub genre_tag: Option<String>,
    pub text_kind: Option<TextKind>,
}

impl GridPoint {
    pub fn from_counts(unit_id: &str, level: UnitLevel, c: &LabelCounts, display: UnitDisplay) -> Self {
        let n = c.n as f64;
        GridPoint {
            unit_id: unit_id.to_string(),
            level,
            n_sentences: c.n,
            frac_fact: c.fact as f64 / n,
            frac_opinion: c.opinion as f64 / n,
            frac_neither: c.neither as f64 / n,
            frac_formal: c.formal as f64 / n,
            genre_tag: display.genre_tag,
            text_kind: display.text_kind,
        }
    }

    /// (x, y) in [0, 1] under the chosen factuality denominator.
    pub fn coordinates(&self, axis: FactualityAxis) -> (f64, f64) {
        let x = match axis {
            FactualityAxis::AllSentences => self.frac_fact,
            FactualityAxis::FactVsOpinion => {
                let denom = self.frac_fact + self.frac_opinion;
                if denom > 0.0 {
                    self.frac_fact / denom
                } else {
                    0.0
                }
            }
        };
        (x, self.frac_formal)
    }
}

fn take_capped(pairs: &[&SentenceLabelPair], cap: Option<usize>) -> Vec<SentenceLabelPair> {
    let mut sorted: Vec<&SentenceLabelPair> = pairs.to_vec();
    sorted.sort_by_key(|p| p.position);
    sorted
        .into_iter()
        .take(cap.unwrap_or(usize::MAX))
        .cloned()
        .collect()
}

/// Counts over the first `cap` sentences (by position) of one item.
pub fn item_counts(pairs: &[&SentenceLabelPair], cap: Option<usize>) -> Result<LabelCounts, GridError> {
    let mut c = LabelCounts::default();
    for p in take_capped(pairs, cap) {
        c.add(&p)?;
    }
    Ok(c)
}

/// Grid point of one item from its labeled sentences.
pub fn score_item(
    item_id: &str,
    pairs: &[&SentenceLabelPair],
    cap: Option<usize>,
    display: UnitDisplay,
) -> Result<GridPoint, GridError> {
    let counts = item_counts(pairs, cap)?;
    if counts.n == 0 {
        return Err(GridError::NoSentences(item_id.to_string()));
    }
    Ok(GridPoint::from_counts(item_id, UnitLevel::Item, &counts, display))
}

fn by_item(pairs: &[SentenceLabelPair]) -> BTreeMap<&str, Vec<&SentenceLabelPair>> {
    let mut m: BTreeMap<&str, Vec<&SentenceLabelPair>> = BTreeMap::new();
    for p in pairs {
        m.entry(p.item_id.as_str()).or_default().push(p);
    }
    m
}

/// Item-level points, sorted by item id.
pub fn score_items(
    pairs: &[SentenceLabelPair],
    cap: Option<usize>,
    display: &HashMap<String, UnitDisplay>,
) -> Result<Vec<GridPoint>, GridError> {
    by_item(pairs)
        .into_iter()
        .map(|(id, ps)| score_item(id, &ps, cap, display.get(id).cloned().unwrap_or_default()))
        .collect()
}

/// Group-level points, sorted by group id.
///
/// `grouping` maps every item to its group (outlet or section); each item
/// contributes its first `cap` sentences.
pub fn aggregate_units(
    pairs: &[SentenceLabelPair],
    grouping: &HashMap<String, String>,
    level: UnitLevel,
    cap: Option<usize>,
    aggregation: Aggregation,
    display: &HashMap<String, UnitDisplay>,
) -> Result<Vec<GridPoint>, GridError> {
    let items = by_item(pairs);
    let unmapped: Vec<String> = items
        .keys()
        .filter(|id| !grouping.contains_key(**id))
        .map(|id| id.to_string())
        .collect();
    if !unmapped.is_empty() {
        return Err(GridError::Unmapped(unmapped));
    }
    let mut groups: BTreeMap<&str, Vec<LabelCounts>> = BTreeMap::new();
    for (id, ps) in &items {
        let counts = item_counts(ps, cap)?;
        groups.entry(grouping[*id].as_str()).or_default().push(counts);
    }
    Ok(groups
        .into_iter()
        .map(|(group, members)| {
            let shown = display.get(group).cloned().unwrap_or_default();
            let mut pooled = LabelCounts::default();
            members.iter().for_each(|c| pooled.merge(c));
            let mut point = GridPoint::from_counts(group, level, &pooled, shown);
            if aggregation == Aggregation::ItemMean {
                let k = members.len() as f64;
                let mean = |f: fn(&LabelCounts) -> usize| {
                    members.iter().map(|c| f(c) as f64 / c.n as f64).sum::<f64>() / k
                };
                point.frac_fact = mean(|c| c.fact);
                point.frac_opinion = mean(|c| c.opinion);
                point.frac_neither = mean(|c| c.neither);
                point.frac_formal = mean(|c| c.formal);
            }
            point
        })
        .collect())
}

/// Item → group mapping and per-unit display attributes for a level.
///
/// A group shows a genre tag or text kind only when all its items agree.
pub fn grouping_for(
    items: &[NewsItem],
    level: UnitLevel,
) -> (HashMap<String, String>, HashMap<String, UnitDisplay>) {
    let mut grouping = HashMap::new();
    let mut display: HashMap<String, UnitDisplay> = HashMap::new();
    let mut conflicts: HashMap<String, (bool, bool)> = HashMap::new();
    for item in items {
        let group = match level {
            UnitLevel::Item => Some(item.item_id.clone()),
            UnitLevel::Outlet => Some(item.outlet.clone()),
            UnitLevel::Section => item.section.clone(),
        };
        let Some(group) = group else { continue };
        grouping.insert(item.item_id.clone(), group.clone());
        let mine = UnitDisplay { genre_tag: item.genre_tag.clone(), text_kind: Some(item.text_kind) };
        match display.get_mut(&group) {
            None => {
                display.insert(group, mine);
            }
            Some(d) => {
                let c = conflicts.entry(group).or_default();
                c.0 |= d.genre_tag != mine.genre_tag;
                c.1 |= d.text_kind != mine.text_kind;
            }
        }
    }
    for (group, (genre, kind)) in conflicts {
        let d = display.get_mut(&group).expect("group exists");
        if genre {
            d.genre_tag = None;
        }
        if kind {
            d.text_kind = None;
        }
    }
    (grouping, display)
}

/// Per-axis plot range in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoomBounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl ZoomBounds {
    pub const FULL: ZoomBounds = ZoomBounds { x: (0.0, 100.0), y: (0.0, 100.0) };
}

/// Zoom margin in percentage points added beyond one standard deviation.
pub const ZOOM_MARGIN: f64 = 5.0;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn axis_bounds(values: &[f64]) -> (f64, f64) {
    let (mean, sd) = mean_sd(values);
    (
        (mean - sd - ZOOM_MARGIN).clamp(0.0, 100.0),
        (mean + sd + ZOOM_MARGIN).clamp(0.0, 100.0),
    )
}

/// `mean ± sd ± 5` per axis in percent (population sd), clamped to [0, 100].
pub fn compute_zoom_bounds(points: &[GridPoint], axis: FactualityAxis) -> Result<ZoomBounds, GridError> {
    if points.len() < 2 {
        return Err(GridError::TooFewPoints(points.len()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .map(|p| {
            let (x, y) = p.coordinates(axis);
            (x * 100.0, y * 100.0)
        })
        .unzip();
    Ok(ZoomBounds { x: axis_bounds(&xs), y: axis_bounds(&ys) })
}

#[derive(Serialize, Deserialize)]
struct GridRow {
    unit_id: String,
    level: UnitLevel,
    n_sentences: usize,
    frac_fact: f64,
    frac_opinion: f64,
    frac_neither: f64,
    frac_formal: f64,
    genre_tag: Option<String>,
    text_kind: Option<TextKind>,
}

/// Writes the grid CSV; floats use shortest round-trip formatting.
pub fn write_grid_csv<W: Write>(writer: W, points: &[GridPoint]) -> Result<(), GridError> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(GridRow {
            unit_id: p.unit_id.clone(),
            level: p.level,
            n_sentences: p.n_sentences,
            frac_fact: p.frac_fact,
            frac_opinion: p.frac_opinion,
            frac_neither: p.frac_neither,
            frac_formal: p.frac_formal,
            genre_tag: p.genre_tag.clone(),
            text_kind: p.text_kind,
        })
        .map_err(|e| GridError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| GridError::Csv(e.to_string()))
}

pub fn read_grid_csv<R: Read>(reader: R) -> Result<Vec<GridPoint>, GridError> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize::<GridRow>()
        .map(|row| {
            let row = row.map_err(|e| GridError::Csv(e.to_string()))?;
            Ok(GridPoint {
                unit_id: row.unit_id,
                level: row.level,
                n_sentences: row.n_sentences,
                frac_fact: row.frac_fact,
                frac_opinion: row.frac_opinion,
                frac_neither: row.frac_neither,
                frac_formal: row.frac_formal,
                genre_tag: row.genre_tag.filter(|s| !s.is_empty()),
                text_kind: row.text_kind,
            })
        })
        .collect()
}
