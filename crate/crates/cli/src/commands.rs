use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use genre_grid::annotation::{consolidate as consolidate_votes, krippendorff_alpha, load_annotations, load_gold};
use genre_grid::classifiers::{
    default_grid, grid_search_cv, predict as predict_labels, stratified_split, LabeledSentences, ModelConfig,
    SplitRatios,
};
use genre_grid::corpus::{build_sentence_table, load_corpus, load_sentences, CorpusFormat};
use genre_grid::evaluation::evaluate as score;
use genre_grid::grid::{
    aggregate_units, compute_zoom_bounds, grouping_for, read_grid_csv, render_grid, score_items, write_grid_csv,
    RenderOptions, UnitDisplay,
};
use genre_grid::predictions::{load_predictions, merge_sources, write_predictions, PredictionRecord};
use genre_grid::{jsonl, GoldLabel, Label, NewsItem, PipelineConfig, Task, TrainedModel, UnitLevel};
use serde::{Deserialize, Serialize};

use crate::manifest::Run;
use crate::{
    AlphaArgs, ConsolidateArgs, EvaluateArgs, GridArgs, IngestArgs, PredictArgs, RenderArgs, TrainArgs,
};

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    jsonl::write_all(BufWriter::new(file), records).with_context(|| format!("writing {}", path.display()))
}

fn corpus_format(path: &Path, explicit: Option<&str>) -> Result<CorpusFormat> {
    let name = match explicit {
        Some(f) => f.to_string(),
        None => path.extension().and_then(|e| e.to_str()).unwrap_or("jsonl").to_string(),
    };
    Ok(name.parse()?)
}

fn read_corpus(path: &Path, format: Option<&str>) -> Result<Vec<NewsItem>> {
    load_corpus(path, corpus_format(path, format)?).with_context(|| format!("reading corpus {}", path.display()))
}

fn gold_for(path: &Path, task: Task) -> Result<HashMap<String, Label>> {
    let gold: Vec<GoldLabel> = load_gold(path).with_context(|| format!("reading gold labels {}", path.display()))?;
    Ok(gold.into_iter().filter(|g| g.task == task).map(|g| (g.sentence_id, g.label)).collect())
}

/// Labels present in either list, in the task's canonical order.
fn observed_labels(task: Task, a: &[Label], b: &[Label]) -> Vec<Label> {
    let seen: HashSet<Label> = a.iter().chain(b).copied().collect();
    task.labels().iter().copied().filter(|l| seen.contains(l)).collect()
}

pub fn ingest(a: &IngestArgs) -> Result<Run> {
    let mut run = Run::default();
    let items = read_corpus(&a.corpus, a.format.as_deref())?;
    run.input(&a.corpus);
    let config = match &a.config {
        Some(p) => {
            run.input(p);
            PipelineConfig::from_path(p)?
        }
        None => PipelineConfig::from_env()?.unwrap_or_default(),
    };
    config.validate()?;
    let (sentences, stats) = build_sentence_table(&items, &config);
    write_jsonl(&a.out, &sentences)?;
    run.output(&a.out);
    eprintln!(
        "ingest: {} items, {} segmented, {} kept ({} too short, {} too long, {} source leak)",
        stats.items, stats.segmented, stats.kept, stats.too_short, stats.too_long, stats.source_leak
    );
    if let Some(r) = &a.report {
        write_json(r, &stats)?;
        run.output(r);
    }
    Ok(run)
}

#[derive(Serialize)]
struct ConsolidationReport {
    task: Task,
    discards: genre_grid::DiscardReport,
    class_shares: Vec<(Label, f64)>,
}

pub fn consolidate(a: &ConsolidateArgs) -> Result<Run> {
    let mut run = Run::default();
    let records = load_annotations(&a.annotations)
        .with_context(|| format!("reading annotations {}", a.annotations.display()))?;
    run.input(&a.annotations);
    let records: Vec<_> = records.into_iter().filter(|r| r.task == a.task).collect();
    let c = consolidate_votes(&records, a.task)?;
    write_jsonl(&a.out, &c.gold)?;
    run.output(&a.out);
    let shares = c.class_shares(a.task);
    let listed: Vec<String> = shares.iter().map(|(l, s)| format!("{l} {:.2}%", s * 100.0)).collect();
    eprintln!(
        "consolidate: {} gold sentences ({}); discarded {} tied, {} all neutral, {} too few votes",
        c.gold.len(),
        listed.join(", "),
        c.report.tied,
        c.report.all_neutral,
        c.report.too_few_votes
    );
    if let Some(r) = &a.report {
        write_json(r, &ConsolidationReport { task: a.task, discards: c.report, class_shares: shares })?;
        run.output(r);
    }
    Ok(run)
}

pub fn alpha(a: &AlphaArgs) -> Result<Run> {
    let mut run = Run::default();
    let records = load_annotations(&a.annotations)
        .with_context(|| format!("reading annotations {}", a.annotations.display()))?;
    run.input(&a.annotations);
    let records: Vec<_> = records.into_iter().filter(|r| r.task == a.task).collect();
    let report = krippendorff_alpha(&records, a.task, a.metric)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "alpha = {:.6}", report.alpha)?;
    writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        run.output(out);
    }
    Ok(run)
}

/// Sentence ids per split part, as written by `train --split-out`.
#[derive(Serialize, Deserialize)]
struct SplitFile {
    task: Task,
    seed: u64,
    stratified: bool,
    train: Vec<String>,
    validation: Vec<String>,
    test: Vec<String>,
}

#[derive(Serialize)]
struct TrainResults<'a> {
    task: Task,
    seed: u64,
    folds: usize,
    n_sentences: usize,
    ranked: &'a [genre_grid::classifiers::CellResult],
    test: genre_grid::EvaluationReport,
}

pub fn train(a: &TrainArgs) -> Result<Run> {
    let mut run = Run { seed: Some(a.seed), ..Default::default() };
    let sentences = load_sentences(&a.sentences)?;
    run.input(&a.sentences);
    let gold = gold_for(&a.gold, a.task)?;
    run.input(&a.gold);
    let candidates: Vec<ModelConfig> = if a.grid == "default" {
        default_grid()
    } else {
        let path = Path::new(&a.grid);
        run.input(path);
        serde_json::from_str(&fs::read_to_string(path).with_context(|| format!("reading grid {}", a.grid))?)
            .with_context(|| format!("parsing grid {}", a.grid))?
    };

    let mut ids = Vec::new();
    let mut data = LabeledSentences::default();
    for s in &sentences {
        if let Some(&label) = gold.get(&s.sentence_id) {
            ids.push(s.sentence_id.clone());
            data.texts.push(s.text.clone());
            data.labels.push(label);
        }
    }
    if ids.is_empty() {
        bail!("no sentence in {} has a {} gold label", a.sentences.display(), a.task);
    }
    eprintln!("train: {} labeled sentences, {} grid cells, seed {}", ids.len(), candidates.len(), a.seed);

    let label_set = observed_labels(a.task, &data.labels, &[]);
    let split = stratified_split(&data.labels, &label_set, SplitRatios::default(), a.seed)?;
    let outcome = grid_search_cv(a.task, &data, &split, &candidates, a.folds, a.seed)?;
    let mut model_json = outcome.best.to_json();
    model_json.push('\n');
    fs::write(&a.out, model_json).with_context(|| format!("writing {}", a.out.display()))?;
    run.output(&a.out);

    let test_texts: Vec<&str> = split.test.iter().map(|&r| data.texts[r].as_str()).collect();
    let truth: Vec<Label> = split.test.iter().map(|&r| data.labels[r]).collect();
    let pred: Vec<Label> = predict_labels(&outcome.best, &test_texts).into_iter().map(|p| p.label).collect();
    let report = score(&truth, &pred, &observed_labels(a.task, &truth, &pred))?;
    let best = &outcome.ranked[0];
    eprintln!(
        "train: best {} on {} (min_df {}), cv macro-F1 {:.4}, test macro-F1 {:.4}",
        best.config.model.kind(),
        best.config.vectorizer,
        best.config.min_df,
        best.mean_macro_f1,
        report.macro_f1()
    );

    if let Some(r) = &a.results {
        write_json(
            r,
            &TrainResults {
                task: a.task,
                seed: a.seed,
                folds: a.folds,
                n_sentences: ids.len(),
                ranked: &outcome.ranked,
                test: report,
            },
        )?;
        run.output(r);
    }
    if let Some(p) = &a.split_out {
        let pick = |rows: &[usize]| rows.iter().map(|&r| ids[r].clone()).collect();
        write_json(
            p,
            &SplitFile {
                task: a.task,
                seed: split.seed,
                stratified: split.stratified,
                train: pick(&split.train),
                validation: pick(&split.validation),
                test: pick(&split.test),
            },
        )?;
        run.output(p);
    }
    Ok(run)
}

#[derive(Serialize)]
struct EvaluationOutput {
    task: Task,
    source: String,
    missing_predictions: usize,
    report: genre_grid::EvaluationReport,
}

pub fn evaluate(a: &EvaluateArgs) -> Result<Run> {
    let mut run = Run::default();
    let gold: Vec<GoldLabel> = load_gold(&a.gold)?;
    run.input(&a.gold);
    let Some(first) = gold.first() else { bail!("{} holds no gold labels", a.gold.display()) };
    let task = first.task;
    if gold.iter().any(|g| g.task != task) {
        bail!("{} mixes tasks; evaluate one task at a time", a.gold.display());
    }
    let mut wanted: Vec<(String, Label)> = gold.into_iter().map(|g| (g.sentence_id, g.label)).collect();
    if let Some(p) = &a.split {
        let split: SplitFile = serde_json::from_str(&fs::read_to_string(p)?)
            .with_context(|| format!("parsing split {}", p.display()))?;
        run.input(p);
        let test: HashSet<String> = split.test.into_iter().collect();
        wanted.retain(|(id, _)| test.contains(id));
    }

    let (source, predicted): (String, HashMap<String, Label>) = if let Some(m) = &a.model {
        let model = TrainedModel::load(m)?;
        run.input(m);
        if model.task != task {
            bail!("model is for {} but the gold labels are for {}", model.task, task);
        }
        let Some(sp) = &a.sentences else { bail!("--sentences is required with --model") };
        let sentences = load_sentences(sp)?;
        run.input(sp);
        let targets: HashSet<&str> = wanted.iter().map(|(id, _)| id.as_str()).collect();
        let chosen: Vec<_> = sentences.iter().filter(|s| targets.contains(s.sentence_id.as_str())).collect();
        let texts: Vec<&str> = chosen.iter().map(|s| s.text.as_str()).collect();
        let labels = predict_labels(&model, &texts);
        let source = format!("{}-{}", model.model_kind, model.vectorizer_kind);
        (source, chosen.iter().zip(labels).map(|(s, p)| (s.sentence_id.clone(), p.label)).collect())
    } else {
        let p = a.predictions.as_ref().expect("clap requires --model or --predictions");
        let records = load_predictions(p, Some(task))?;
        run.input(p);
        let models: BTreeSet<&str> = records.iter().map(|r| r.model_id.as_str()).collect();
        if models.len() > 1 {
            bail!("{} holds several sources ({}); evaluate one at a time", p.display(), models.into_iter().collect::<Vec<_>>().join(", "));
        }
        let source = models.into_iter().next().unwrap_or("predictions").to_string();
        (source, records.into_iter().map(|r| (r.sentence_id, r.label)).collect())
    };

    let mut truth = Vec::new();
    let mut pred = Vec::new();
    let mut missing = 0;
    for (id, label) in &wanted {
        match predicted.get(id) {
            Some(&p) => {
                truth.push(*label);
                pred.push(p);
            }
            None => missing += 1,
        }
    }
    if missing > 0 {
        eprintln!("evaluate: {missing} gold sentences have no prediction and are skipped");
    }
    let report = score(&truth, &pred, &observed_labels(task, &truth, &pred))?;
    eprintln!("evaluate: {source} on {task}\n{report}");
    write_json(&a.out, &EvaluationOutput { task, source, missing_predictions: missing, report })?;
    run.output(&a.out);
    Ok(run)
}

pub fn predict(a: &PredictArgs) -> Result<Run> {
    let mut run = Run::default();
    let model = TrainedModel::load(&a.model)?;
    run.input(&a.model);
    let sentences = load_sentences(&a.sentences)?;
    run.input(&a.sentences);
    let model_id = a
        .model_id
        .clone()
        .unwrap_or_else(|| format!("{}-{}", model.model_kind, model.vectorizer_kind));
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    let records: Vec<PredictionRecord> = sentences
        .iter()
        .zip(predict_labels(&model, &texts))
        .map(|(s, p)| PredictionRecord::from_prediction(&s.sentence_id, &model, &p, &model_id))
        .collect();
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_predictions(BufWriter::new(file), &records)?;
    run.output(&a.out);
    eprintln!("predict: {} {} labels from {model_id}", records.len(), model.task);
    Ok(run)
}

pub fn grid(a: &GridArgs) -> Result<Run> {
    let mut run = Run::default();
    let sentences = load_sentences(&a.sentences)?;
    run.input(&a.sentences);
    let mut records = Vec::new();
    for p in &a.predictions {
        records.extend(load_predictions(p, None).with_context(|| format!("reading predictions {}", p.display()))?);
        run.input(p);
    }
    let merged = merge_sources(&records, &a.precedence, &sentences);
    let c = &merged.coverage;
    eprintln!(
        "grid: {} of {} sentences labeled on both axes ({} lack factuality, {} lack formality, {} unknown records)",
        c.covered,
        c.sentences,
        c.missing_factuality.len(),
        c.missing_formality.len(),
        c.unknown_sentences
    );

    let (grouping, display): (HashMap<String, String>, HashMap<String, UnitDisplay>) = match &a.corpus {
        Some(p) => {
            let items = read_corpus(p, None)?;
            run.input(p);
            grouping_for(&items, a.level)
        }
        None if a.level == UnitLevel::Item => Default::default(),
        None => bail!("--corpus is required for --level {}", a.level),
    };
    let cap = if a.no_cap { None } else { Some(a.cap) };
    let points = if a.level == UnitLevel::Item {
        score_items(&merged.pairs, cap, &display)?
    } else {
        let (pairs, dropped): (Vec<_>, Vec<_>) =
            merged.pairs.into_iter().partition(|p| grouping.contains_key(&p.item_id));
        if !dropped.is_empty() {
            eprintln!("grid: {} sentences belong to items without a {}", dropped.len(), a.level);
        }
        aggregate_units(&pairs, &grouping, a.level, cap, a.aggregation, &display)?
    };
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_grid_csv(BufWriter::new(file), &points)?;
    run.output(&a.out);
    eprintln!("grid: {} {} points", points.len(), a.level);
    if let Some(p) = &a.coverage {
        write_json(p, &merged.coverage)?;
        run.output(p);
    }
    Ok(run)
}

pub fn render(a: &RenderArgs) -> Result<Run> {
    let mut run = Run::default();
    let file = File::open(&a.grid).with_context(|| format!("opening {}", a.grid.display()))?;
    let points = read_grid_csv(file)?;
    run.input(&a.grid);
    let zoom = if a.zoom { Some(compute_zoom_bounds(&points, a.axis)?) } else { None };
    let options = RenderOptions {
        color_by_genre: !a.no_color,
        shape_by_kind: !a.no_shape,
        size_by_count: a.size_by_count,
        hulls: a.hulls,
        zoom,
        axis: a.axis,
        title: a.title.clone(),
    };
    let rendered = render_grid(&points, &options);
    fs::write(&a.out, &rendered.svg).with_context(|| format!("writing {}", a.out.display()))?;
    run.output(&a.out);
    if let Some(p) = &a.csv_out {
        fs::write(p, &rendered.csv).with_context(|| format!("writing {}", p.display()))?;
        run.output(p);
    }
    Ok(run)
}
