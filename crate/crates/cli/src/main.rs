//! `genre-grid` command-line interface.
//!
//! Every subcommand reads and writes files only; diagnostics go to stderr.
//! Exit status is 0 on success, 1 on a validation error and 2 on a usage
//! error. Each run writes `<out>.manifest.json` with input/output hashes.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genre_grid::grid::{Aggregation, FactualityAxis};
use genre_grid::{ReliabilityMetric, Task, UnitLevel};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "genre-grid", version, about = "News genre grids from sentence-level factuality and formality labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Segment and filter news items into a sentence table.
    Ingest(IngestArgs),
    /// Merge annotator votes into gold labels.
    Consolidate(ConsolidateArgs),
    /// Krippendorff's alpha over annotator ratings.
    Alpha(AlphaArgs),
    /// Split, grid-search and fit a baseline classifier.
    Train(TrainArgs),
    /// Score a model or a prediction file against gold labels.
    Evaluate(EvaluateArgs),
    /// Label a sentence table with a trained model.
    Predict(PredictArgs),
    /// Aggregate sentence labels into grid points.
    Grid(GridArgs),
    /// Draw grid points as an SVG scatter plot.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// jsonl or csv; inferred from the extension when omitted
    #[arg(long)]
    pub format: Option<String>,
    /// TOML or JSON pipeline config (defaults to $GENRE_GRID_CONFIG)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Filter statistics as JSON
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConsolidateArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub task: Task,
    #[arg(long)]
    pub out: PathBuf,
    /// Discard report as JSON
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AlphaArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub task: Task,
    #[arg(long, default_value = "nominal")]
    pub metric: ReliabilityMetric,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub sentences: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub task: Task,
    /// `default` or a JSON file holding a list of model configurations
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Ranked grid-search results and test-set report as JSON
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Sentence ids of each split part as JSON
    #[arg(long)]
    pub split_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long, conflicts_with = "predictions", required_unless_present = "predictions")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Sentence table; required with --model
    #[arg(long)]
    pub sentences: Option<PathBuf>,
    #[arg(long)]
    pub gold: PathBuf,
    /// Split file from `train --split-out`; restricts scoring to its test part
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub sentences: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Source name recorded in each record (default: `<model kind>-<vectorizer>`)
    #[arg(long)]
    pub model_id: Option<String>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Prediction files; repeat for several sources
    #[arg(long, required = true)]
    pub predictions: Vec<PathBuf>,
    #[arg(long)]
    pub sentences: PathBuf,
    /// News items, for outlet/section grouping and display attributes
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "item")]
    pub level: UnitLevel,
    #[arg(long, default_value_t = genre_grid::grid::DEFAULT_CAP, conflicts_with = "no_cap")]
    pub cap: usize,
    /// Use every sentence of each item
    #[arg(long)]
    pub no_cap: bool,
    /// Model ids in decreasing precedence; comma-separated or repeated
    #[arg(long, value_delimiter = ',')]
    pub precedence: Vec<String>,
    #[arg(long, default_value = "pooled")]
    pub aggregation: Aggregation,
    #[arg(long)]
    pub out: PathBuf,
    /// Coverage report as JSON
    #[arg(long)]
    pub coverage: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Shade the convex hull of each genre
    #[arg(long)]
    pub hulls: bool,
    /// Marker area proportional to sentence count
    #[arg(long)]
    pub size_by_count: bool,
    /// Zoom to mean ± sd ± 5 per axis
    #[arg(long)]
    pub zoom: bool,
    #[arg(long, default_value = "all")]
    pub axis: FactualityAxis,
    #[arg(long)]
    pub no_color: bool,
    #[arg(long)]
    pub no_shape: bool,
    #[arg(long)]
    pub title: Option<String>,
    /// Plotted points in grid CSV layout
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (name, result) = match cli.command {
        Command::Ingest(a) => ("ingest", commands::ingest(&a)),
        Command::Consolidate(a) => ("consolidate", commands::consolidate(&a)),
        Command::Alpha(a) => ("alpha", commands::alpha(&a)),
        Command::Train(a) => ("train", commands::train(&a)),
        Command::Evaluate(a) => ("evaluate", commands::evaluate(&a)),
        Command::Predict(a) => ("predict", commands::predict(&a)),
        Command::Grid(a) => ("grid", commands::grid(&a)),
        Command::Render(a) => ("render", commands::render(&a)),
    };
    match result.and_then(|run| manifest::write(name, &args, &run)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
