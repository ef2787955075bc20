mod common;

use std::cell::RefCell;
use std::collections::BTreeSet;

use common::separable_corpus;
use genre_grid::classifiers::{
    grid_search_cv, predict, stratified_folds, stratified_split, ExampleSource, LabeledSentences, ModelConfig,
    ModelSpec, SplitRatios, VectorizerKind,
};
use genre_grid::evaluation::evaluate;
use genre_grid::{Label, Task, TrainedModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every assignment of rows to (train, validation, test) whose per-class
/// counts are within one item of the ideal shares.
fn admissible_assignments(labels: &[Label], classes: &[Label]) -> BTreeSet<Vec<u8>> {
    let n = labels.len();
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(n as u32) {
        let parts: Vec<u8> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as u8).collect();
        let ok = classes.iter().all(|c| {
            let n_c = labels.iter().filter(|l| *l == c).count() as f64;
            let ideal = [0.64 * n_c, 0.16 * n_c, 0.2 * n_c];
            (0..3u8).all(|p| {
                let got = (0..n).filter(|&i| labels[i] == *c && parts[i] == p).count() as f64;
                (got - ideal[p as usize]).abs() <= 1.0
            })
        });
        if ok {
            out.insert(parts);
        }
    }
    out
}

#[test]
fn imbalanced_split_matches_enumeration() {
    let mut labels = vec![Label::Fact; 9];
    labels.push(Label::Opinion);
    let classes = [Label::Fact, Label::Opinion];
    let oracle = admissible_assignments(&labels, &classes);
    assert!(!oracle.is_empty());
    for seed in 0..100 {
        let s = stratified_split(&labels, &classes, SplitRatios::default(), seed).unwrap();
        let mut parts = vec![9u8; labels.len()];
        for (p, rows) in [&s.train, &s.validation, &s.test].iter().enumerate() {
            for &r in rows.iter() {
                assert_eq!(parts[r], 9, "row {r} assigned twice");
                parts[r] = p as u8;
            }
        }
        assert!(oracle.contains(&parts), "seed {seed}: {parts:?}");
    }
}

struct Tracked {
    inner: LabeledSentences,
    touched: RefCell<BTreeSet<usize>>,
}

impl ExampleSource for Tracked {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn text(&self, row: usize) -> &str {
        self.touched.borrow_mut().insert(row);
        self.inner.text(row)
    }

    fn label(&self, row: usize) -> Label {
        self.touched.borrow_mut().insert(row);
        self.inner.label(row)
    }
}

fn small_grid() -> Vec<ModelConfig> {
    let mut grid = Vec::new();
    for vectorizer in [VectorizerKind::Counts, VectorizerKind::Tfidf] {
        for model in [ModelSpec::NaiveBayes { smoothing: 1.0 }, ModelSpec::LinearSvm { reg: 1e-3, epochs: 5 }] {
            grid.push(ModelConfig { vectorizer, min_df: 1, model });
        }
    }
    grid
}

#[test]
fn grid_search_never_reads_test_rows() {
    let (texts, labels) = separable_corpus(120, 4);
    let source = Tracked { inner: LabeledSentences { texts, labels }, touched: RefCell::default() };
    let split = stratified_split(&source.inner.labels, &[Label::Informal, Label::Formal], SplitRatios::default(), 2).unwrap();
    grid_search_cv(Task::Formality, &source, &split, &small_grid(), 5, 0).unwrap();
    let touched = source.touched.borrow();
    assert!(split.test.iter().all(|r| !touched.contains(r)));
    assert!(split.non_test().iter().all(|r| touched.contains(r)));
}

/// One marker word per sentence plus a long, length-varying tail of noise
/// tokens shared by both classes. Raw counts let the tail swamp a linear
/// margin; tf-idf normalization does not.
fn planted_corpus() -> LabeledSentences {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut data = LabeledSentences::default();
    for i in 0..200 {
        let (label, markers) = if i % 2 == 0 {
            (Label::Formal, ["derhalve", "voorts", "aldus"])
        } else {
            (Label::Informal, ["joh", "vet", "haha"])
        };
        let mut words = vec![markers[rng.random_range(0..3)].to_string()];
        for _ in 0..rng.random_range(0..150) {
            words.push(format!("ruis{}", rng.random_range(0..30)));
        }
        data.texts.push(words.join(" "));
        data.labels.push(label);
    }
    data
}

#[test]
fn planted_tfidf_cell_ranks_first() {
    let data = planted_corpus();
    let classes = [Label::Informal, Label::Formal];
    let split = stratified_split(&data.labels, &classes, SplitRatios::default(), 1).unwrap();
    let grid: Vec<ModelConfig> = [VectorizerKind::Counts, VectorizerKind::Tfidf]
        .into_iter()
        .flat_map(|vectorizer| {
            [1e-3, 1e-2].map(|reg| ModelConfig { vectorizer, min_df: 1, model: ModelSpec::LinearSvm { reg, epochs: 20 } })
        })
        .collect();
    let out = grid_search_cv(Task::Formality, &data, &split, &grid, 5, 0).unwrap();

    // exhaustive re-evaluation of every cell on the same folds
    let rows = split.non_test();
    let folds = stratified_folds(&rows, |r| data.labels[r], 5, 0).unwrap();
    let mut scores = Vec::new();
    for cell in &grid {
        let mut total = 0.0;
        for held in &folds {
            let train: Vec<usize> = rows.iter().copied().filter(|r| !held.contains(r)).collect();
            let texts: Vec<&str> = train.iter().map(|&r| data.texts[r].as_str()).collect();
            let labels: Vec<Label> = train.iter().map(|&r| data.labels[r]).collect();
            let model = TrainedModel::train(&texts, &labels, cell, 0).unwrap();
            let eval: Vec<&str> = held.iter().map(|&r| data.texts[r].as_str()).collect();
            let truth: Vec<Label> = held.iter().map(|&r| data.labels[r]).collect();
            let pred: Vec<Label> = predict(&model, &eval).into_iter().map(|p| p.label).collect();
            total += evaluate(&truth, &pred, &classes).unwrap().macro_f1();
        }
        scores.push(total / folds.len() as f64);
    }
    for r in &out.ranked {
        assert!((r.mean_macro_f1 - scores[r.index]).abs() < 1e-12);
    }
    let best_tfidf = scores[2].max(scores[3]);
    let best_counts = scores[0].max(scores[1]);
    assert!(best_tfidf > best_counts + 0.2, "tfidf {best_tfidf} vs counts {best_counts}");
    assert_eq!(out.ranked[0].config.vectorizer, VectorizerKind::Tfidf);
    assert_eq!(out.best.vectorizer_kind, VectorizerKind::Tfidf);
}

#[test]
fn training_is_deterministic() {
    let (texts, labels) = separable_corpus(200, 9);
    for cell in small_grid() {
        let a = TrainedModel::train(&texts, &labels, &cell, 11).unwrap();
        let b = TrainedModel::train(&texts, &labels, &cell, 11).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let reloaded = TrainedModel::from_json(&a.to_json()).unwrap();
        assert_eq!(reloaded, a);
        let preds = predict(&a, &texts);
        assert!(preds.iter().all(|p| a.label_set.contains(&p.label)));
    }
}
