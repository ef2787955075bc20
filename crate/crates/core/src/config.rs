//! Pipeline configuration: sentence filters and segmentation settings.
//!
//! Files ending in `.json` are read as JSON; anything else as TOML.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that may point at a configuration file.
pub const CONFIG_ENV_VAR: &str = "GENRE_GRID_CONFIG";

pub const DEFAULT_MIN_WORDS: usize = 5;
pub const DEFAULT_MAX_WORDS: usize = 50;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid word bounds: min_words={min} max_words={max}")]
    Bounds { min: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Tokens ending in `.` that do not terminate a sentence, e.g. `dhr.`.
    pub abbreviations: Vec<String>,
    /// Source-revealing terms per outlet.
    pub leak_terms: BTreeMap<String, Vec<String>>,
    pub min_words: usize,
    pub max_words: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            abbreviations: default_abbreviations(),
            leak_terms: BTreeMap::new(),
            min_words: DEFAULT_MIN_WORDS,
            max_words: DEFAULT_MAX_WORDS,
        }
    }
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config: PipelineConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
                path: display.clone(),
                message: e.to_string(),
            })?
        } else {
            toml::from_str(&text).map_err(|e| ConfigError::Parse {
                path: display.clone(),
                message: e.to_string(),
            })?
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads the file named by `GENRE_GRID_CONFIG`, if set.
    pub fn from_env() -> Result<Option<Self>, ConfigError> {
        match std::env::var_os(CONFIG_ENV_VAR) {
            Some(p) if !p.is_empty() => Self::from_path(Path::new(&p)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_words == 0 || self.min_words > self.max_words {
            return Err(ConfigError::Bounds {
                min: self.min_words,
                max: self.max_words,
            });
        }
        Ok(())
    }

    /// Every leak term across all outlets, deduplicated.
    pub fn all_leak_terms(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.leak_terms.values().flatten().collect();
        set.into_iter().cloned().collect()
    }
}

/// Common Dutch abbreviations and initials-style tokens.
pub fn default_abbreviations() -> Vec<String> {
    [
        "dhr.", "mevr.", "mr.", "dr.", "drs.", "ir.", "ing.", "prof.", "mw.", "bijv.", "bv.",
        "o.a.", "m.a.w.", "d.w.z.", "e.d.", "enz.", "etc.", "ca.", "nr.", "blz.", "jl.", "resp.",
        "t.o.v.", "i.p.v.", "z.g.", "vs.", "st.", "jr.", "sr.",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("c.toml");
        std::fs::write(
            &toml_path,
            "abbreviations = [\"J.\"]\nmin_words = 5\nmax_words = 50\n\n[leak_terms]\n\"Zondag met Lubach\" = [\"Lubach\"]\n",
        )
        .unwrap();
        let json_path = dir.path().join("c.json");
        std::fs::write(
            &json_path,
            r#"{"abbreviations":["J."],"leak_terms":{"Zondag met Lubach":["Lubach"]},"min_words":5,"max_words":50}"#,
        )
        .unwrap();
        let a = PipelineConfig::from_path(&toml_path).unwrap();
        let b = PipelineConfig::from_path(&json_path).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.all_leak_terms(), vec!["Lubach".to_string()]);
    }

    #[test]
    fn rejects_inverted_bounds() {
        let cfg = PipelineConfig { min_words: 10, max_words: 5, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::Bounds { .. })));
    }
}
