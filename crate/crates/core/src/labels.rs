//! Tasks and their label domains.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two annotation/classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Factuality,
    Formality,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::Factuality, Task::Formality];

    /// Gold label domain of the task, in canonical order.
    pub fn labels(self) -> &'static [Label] {
        match self {
            Task::Factuality => &[Label::Fact, Label::Opinion, Label::Neither],
            Task::Formality => &[Label::Informal, Label::Formal],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Factuality => "factuality",
            Task::Formality => "formality",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "factuality" => Ok(Task::Factuality),
            "formality" => Ok(Task::Formality),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

/// A sentence-level class on either axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fact,
    Opinion,
    Neither,
    Informal,
    Formal,
}

impl Label {
    pub fn task(self) -> Task {
        match self {
            Label::Fact | Label::Opinion | Label::Neither => Task::Factuality,
            Label::Informal | Label::Formal => Task::Formality,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Fact => "fact",
            Label::Opinion => "opinion",
            Label::Neither => "neither",
            Label::Informal => "informal",
            Label::Formal => "formal",
        }
    }

    /// Parses a label and checks it belongs to `task`.
    pub fn parse_for(task: Task, s: &str) -> Option<Label> {
        s.parse::<Label>().ok().filter(|l| l.task() == task)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fact" => Ok(Label::Fact),
            "opinion" => Ok(Label::Opinion),
            "neither" => Ok(Label::Neither),
            "informal" => Ok(Label::Informal),
            "formal" => Ok(Label::Formal),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown name `{0}`")]
pub struct UnknownName(pub String);
