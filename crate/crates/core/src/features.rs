//! Bag-of-words vocabularies and sparse term-count / tf-idf vectors.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot fit a vocabulary on an empty corpus")]
    EmptyCorpus,
    #[error("min_df must be at least 1")]
    InvalidMinDf,
    #[error("vocabulary is inconsistent: {0}")]
    Inconsistent(String),
}

/// Splits on anything that is not alphanumeric; optionally lowercases.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| if lowercase { t.to_lowercase() } else { t.to_string() })
        .collect()
}

/// Term → column index map with document frequencies.
///
/// Terms are indexed in lexicographic order, so fitting is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<u32>,
    n_documents: usize,
    min_df: u32,
    lowercase: bool,
    index: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    df: Vec<u32>,
    n_documents: usize,
    min_df: u32,
    lowercase: bool,
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = FeatureError;

    fn try_from(r: VocabularyRepr) -> Result<Self, Self::Error> {
        if r.terms.len() != r.df.len() {
            return Err(FeatureError::Inconsistent("terms and df lengths differ".into()));
        }
        if r.df.iter().any(|&d| d as usize > r.n_documents || d < r.min_df) {
            return Err(FeatureError::Inconsistent("df out of range".into()));
        }
        let index: HashMap<String, u32> =
            r.terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        if index.len() != r.terms.len() {
            return Err(FeatureError::Inconsistent("duplicate terms".into()));
        }
        Ok(Vocabulary {
            terms: r.terms,
            df: r.df,
            n_documents: r.n_documents,
            min_df: r.min_df,
            lowercase: r.lowercase,
            index,
        })
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            terms: v.terms,
            df: v.df,
            n_documents: v.n_documents,
            min_df: v.min_df,
            lowercase: v.lowercase,
        }
    }
}

impl Vocabulary {
    pub fn fit<S: AsRef<str>>(sentences: &[S], min_df: u32, lowercase: bool) -> Result<Self, FeatureError> {
        if min_df == 0 {
            return Err(FeatureError::InvalidMinDf);
        }
        if sentences.is_empty() {
            return Err(FeatureError::EmptyCorpus);
        }
        let mut df: BTreeMap<String, u32> = BTreeMap::new();
        for s in sentences {
            let mut tokens = tokenize(s.as_ref(), lowercase);
            tokens.sort_unstable();
            tokens.dedup();
            for t in tokens {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let (terms, df): (Vec<String>, Vec<u32>) = df.into_iter().filter(|(_, d)| *d >= min_df).unzip();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Vocabulary {
            terms,
            df,
            n_documents: sentences.len(),
            min_df,
            lowercase,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn min_df(&self) -> u32 {
        self.min_df
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<u32> {
        self.index_of(term).map(|i| self.df[i as usize])
    }

    /// Smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, index: u32) -> f64 {
        let n = self.n_documents as f64;
        let df = self.df[index as usize] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    fn counts(&self, sentence: &str) -> BTreeMap<u32, f64> {
        let mut counts = BTreeMap::new();
        for t in tokenize(sentence, self.lowercase) {
            if let Some(i) = self.index_of(&t) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        counts
    }

    /// Raw term counts; out-of-vocabulary tokens are ignored.
    pub fn transform_counts(&self, sentence: &str) -> SparseVector {
        SparseVector {
            dim: self.len(),
            entries: self.counts(sentence).into_iter().collect(),
        }
    }

    /// Counts times smoothed idf, L2-normalized. All-OOV input stays zero.
    pub fn transform_tfidf(&self, sentence: &str) -> SparseVector {
        let mut v = SparseVector {
            dim: self.len(),
            entries: self
                .counts(sentence)
                .into_iter()
                .map(|(i, c)| (i, c * self.idf(i)))
                .collect(),
        };
        let norm = v.l2_norm();
        if norm > 0.0 {
            v.scale(1.0 / norm);
        }
        v
    }
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(_, w)| w == 0.0)
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |p| self.entries[p].1)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i as usize]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn scale(&mut self, k: f64) {
        for e in &mut self.entries {
            e.1 *= k;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(i, w) in &self.entries {
            d[i as usize] = w;
        }
        d
    }
}
