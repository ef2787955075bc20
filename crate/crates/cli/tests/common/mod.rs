//! Synthetic corpus + annotations and a runner for the `genre-grid` binary.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BIN: &str = env!("CARGO_BIN_EXE_genre-grid");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("GENRE_GRID_CONFIG")
        .output()
        .expect("spawn genre-grid")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "genre-grid {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const FILLER: &[&str] = &["de", "het", "in", "op", "met", "over", "stad", "mensen", "jaar", "week", "nu", "ook"];
const FACT: &[&str] = &["meldde", "bedroeg", "procent", "telde", "vergaderde"];
const OPINION: &[&str] = &["vind", "schandalig", "prachtig", "belachelijk", "hoop"];
const NEITHER: &[&str] = &["welkom", "luister", "bedankt", "kijk", "hallo"];
const FORMAL: &[&str] = &["derhalve", "voorts", "betreffende", "alsmede", "aldus"];
const INFORMAL: &[&str] = &["joh", "haha", "vet", "super", "gewoon"];

struct Outlet {
    name: &'static str,
    genre: &'static str,
    kind: &'static str,
    fact: [f64; 3],
    formal: f64,
}

const OUTLETS: &[Outlet] = &[
    Outlet { name: "Dagblad", genre: "newspaper", kind: "written", fact: [0.8, 0.15, 0.05], formal: 0.85 },
    Outlet { name: "Journaal", genre: "tv news", kind: "spoken", fact: [0.7, 0.1, 0.2], formal: 0.7 },
    Outlet { name: "Satireshow", genre: "tv satire", kind: "spoken", fact: [0.25, 0.6, 0.15], formal: 0.2 },
    Outlet { name: "Opiniesite", genre: "opinion", kind: "written", fact: [0.3, 0.65, 0.05], formal: 0.5 },
];

pub struct Fixture {
    pub corpus: PathBuf,
    pub annotations: PathBuf,
    pub grid: PathBuf,
    pub n_sentences: usize,
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Writes `corpus.jsonl`, `annotations.jsonl` (three raters, both tasks)
/// and a four-cell `grid.json` into `dir`.
pub fn write_fixture(dir: &Path, items_per_outlet: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = String::new();
    let mut annotations = String::new();
    let fact_names = ["fact", "opinion", "neither"];
    let mut n_sentences = 0;
    for outlet in OUTLETS {
        for i in 0..items_per_outlet {
            let item_id = format!("{}-{i:03}", outlet.name.to_lowercase());
            let section = if i % 2 == 0 { "binnenland" } else { "sport" };
            let mut sentences = Vec::new();
            for pos in 0..rng.random_range(4..12) {
                let f = draw(&mut rng, &outlet.fact);
                let formal = rng.random_bool(outlet.formal);
                let mut words: Vec<&str> = (0..rng.random_range(4..9)).map(|_| pick(&mut rng, FILLER)).collect();
                words.push(pick(&mut rng, [FACT, OPINION, NEITHER][f]));
                words.push(pick(&mut rng, if formal { FORMAL } else { INFORMAL }));
                let at = rng.random_range(0..words.len());
                let last = words.len() - 1;
                words.swap(at, last);
                let mut s = words.join(" ");
                let first = s[0..1].to_uppercase();
                s.replace_range(0..1, &first);
                s.push('.');
                sentences.push(s);

                let sid = format!("{item_id}:{pos}");
                for a in 0..3 {
                    let fl = if rng.random_bool(0.85) { f } else { rng.random_range(0..3) };
                    let likert = match (formal, rng.random_bool(0.85)) {
                        (true, true) => rng.random_range(4..=5),
                        (false, true) => rng.random_range(1..=2),
                        _ => rng.random_range(1..=5),
                    };
                    writeln!(
                        annotations,
                        r#"{{"sentence_id":"{sid}","annotator_id":"r{a}","task":"factuality","raw_label":"{}"}}"#,
                        fact_names[fl]
                    )
                    .unwrap();
                    writeln!(
                        annotations,
                        r#"{{"sentence_id":"{sid}","annotator_id":"r{a}","task":"formality","raw_label":{likert}}}"#
                    )
                    .unwrap();
                }
                n_sentences += 1;
            }
            let item = serde_json::json!({
                "item_id": item_id,
                "outlet": outlet.name,
                "genre_tag": outlet.genre,
                "text_kind": outlet.kind,
                "section": section,
                "body": sentences.join(" "),
            });
            corpus.push_str(&item.to_string());
            corpus.push('\n');
        }
    }
    let grid = r#"[
  {"vectorizer":"counts","min_df":1,"model_kind":"naive_bayes","smoothing":1.0},
  {"vectorizer":"tfidf","min_df":1,"model_kind":"naive_bayes","smoothing":0.5},
  {"vectorizer":"tfidf","min_df":1,"model_kind":"linear_svm","reg":0.001,"epochs":10},
  {"vectorizer":"tfidf","min_df":2,"model_kind":"logistic_regression","l2":0.01,"lr":0.5,"epochs":10,"batch_size":32}
]
"#;
    let fx = Fixture {
        corpus: dir.join("corpus.jsonl"),
        annotations: dir.join("annotations.jsonl"),
        grid: dir.join("grid.json"),
        n_sentences,
    };
    fs::write(&fx.corpus, corpus).unwrap();
    fs::write(&fx.annotations, annotations).unwrap();
    fs::write(&fx.grid, grid).unwrap();
    fx
}

/// Runs ingest → consolidate → train → predict → grid → render for both
/// tasks in `dir` with a fixed seed.
pub fn full_pipeline(dir: &Path, seed: u64) {
    write_fixture(dir, 12, 5);
    let seed = seed.to_string();
    run_ok(dir, &["ingest", "--corpus", "corpus.jsonl", "--out", "sentences.jsonl", "--report", "ingest.json"]);
    for task in ["factuality", "formality"] {
        let gold = format!("gold-{task}.jsonl");
        let model = format!("model-{task}.json");
        let preds = format!("pred-{task}.jsonl");
        run_ok(dir, &["consolidate", "--annotations", "annotations.jsonl", "--task", task, "--out", &gold]);
        run_ok(
            dir,
            &[
                "train", "--sentences", "sentences.jsonl", "--gold", &gold, "--task", task, "--grid", "default",
                "--folds", "5", "--seed", &seed, "--out", &model,
            ],
        );
        run_ok(dir, &["predict", "--model", &model, "--sentences", "sentences.jsonl", "--out", &preds]);
    }
    run_ok(
        dir,
        &[
            "grid", "--predictions", "pred-factuality.jsonl", "--predictions", "pred-formality.jsonl", "--sentences",
            "sentences.jsonl", "--corpus", "corpus.jsonl", "--level", "outlet", "--out", "grid.csv",
        ],
    );
    run_ok(dir, &["render", "--grid", "grid.csv", "--out", "grid.svg", "--hulls", "--size-by-count", "--zoom"]);
}
