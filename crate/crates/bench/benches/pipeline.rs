use std::collections::HashMap;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use genre_grid::annotation::{krippendorff_alpha, RawLabel};
use genre_grid::classifiers::{LogisticConfig, ModelConfig, ModelSpec, VectorizerKind};
use genre_grid::features::Vocabulary;
use genre_grid::grid::{aggregate_units, Aggregation, SentenceLabelPair};
use genre_grid::{AnnotationRecord, Label, ReliabilityMetric, Task, TrainedModel, UnitLevel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "de", "het", "een", "in", "op", "met", "over", "stad", "mensen", "jaar", "week", "minister", "kabinet", "wedstrijd",
    "derhalve", "voorts", "joh", "haha", "gewoon", "vind", "meldde", "procent",
];

fn sentences(n: usize, rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<Label>) {
    let mut texts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let formal = rng.random_bool(0.5);
        let mut words: Vec<&str> = (0..rng.random_range(6..20)).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
        words.push(if formal { "derhalve" } else { "joh" });
        texts.push(words.join(" "));
        labels.push(if formal { Label::Formal } else { Label::Informal });
    }
    (texts, labels)
}

fn annotations(n_units: usize, rng: &mut ChaCha8Rng) -> Vec<AnnotationRecord> {
    let mut out = Vec::new();
    for u in 0..n_units {
        for a in 0..3 {
            out.push(AnnotationRecord {
                sentence_id: format!("s{u}"),
                annotator_id: format!("a{a}"),
                task: Task::Formality,
                raw_label: RawLabel::Likert(rng.random_range(1..=5)),
            });
        }
    }
    out
}

fn bench_alpha(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let records = annotations(5_000, &mut rng);
    let mut g = c.benchmark_group("alpha");
    for (name, metric) in [("nominal", ReliabilityMetric::Nominal), ("interval", ReliabilityMetric::Interval)] {
        g.bench_function(name, |b| b.iter(|| krippendorff_alpha(&records, Task::Formality, metric).unwrap()));
    }
    g.finish();
}

fn bench_features(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (texts, _) = sentences(5_000, &mut rng);
    let vocab = Vocabulary::fit(&texts, 1, true).unwrap();
    c.bench_function("vocabulary fit 5k", |b| b.iter(|| Vocabulary::fit(&texts, 1, true).unwrap()));
    c.bench_function("tfidf transform 5k", |b| {
        b.iter(|| texts.iter().map(|t| vocab.transform_tfidf(t)).collect::<Vec<_>>())
    });
}

fn bench_training(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (texts, labels) = sentences(2_000, &mut rng);
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let mut g = c.benchmark_group("train 2k");
    g.sample_size(10);
    let models = [
        ("naive bayes", ModelSpec::NaiveBayes { smoothing: 1.0 }),
        ("logistic regression", ModelSpec::LogisticRegression(LogisticConfig::default())),
        ("linear svm", ModelSpec::LinearSvm { reg: 1e-3, epochs: 20 }),
    ];
    for (name, model) in models {
        let config = ModelConfig { vectorizer: VectorizerKind::Tfidf, min_df: 1, model };
        g.bench_function(name, |b| b.iter(|| TrainedModel::train(&refs, &labels, &config, 7).unwrap()));
    }
    g.finish();
}

fn bench_aggregation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fact = Task::Factuality.labels();
    let mut pairs = Vec::new();
    let mut groups = HashMap::new();
    for i in 0..2_000 {
        let item = format!("it{i}");
        groups.insert(item.clone(), format!("outlet{}", i % 20));
        for pos in 0..rng.random_range(5..200) {
            pairs.push(SentenceLabelPair {
                sentence_id: format!("{item}:{pos}"),
                item_id: item.clone(),
                position: pos,
                factuality: fact[rng.random_range(0..fact.len())],
                formality: if rng.random_bool(0.5) { Label::Formal } else { Label::Informal },
            });
        }
    }
    let display = HashMap::new();
    c.bench_function("aggregate outlets", |b| {
        b.iter_batched(
            || pairs.clone(),
            |p| aggregate_units(&p, &groups, UnitLevel::Outlet, Some(100), Aggregation::Pooled, &display).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, bench_alpha, bench_features, bench_training, bench_aggregation);
criterion_main!(benches);
