//! `docrel` command-line tool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use docrel::embeddings::ConcatScheme;
use docrel::evaluation::ReportFormat;

mod commands;
mod config;

use config::{Embedder, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "docrel", version, about = "Semantic relations between document pairs")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration; relative paths in it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice (sampling, shuffles, initialization).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pair concatenation scheme: uv, uvd or uvdp.
    #[arg(long, global = true, value_parser = parse_scheme)]
    scheme: Option<ConcatScheme>,
    #[arg(long, global = true, value_enum)]
    embedder: Option<Embedder>,
    /// Number of cross-validation folds.
    #[arg(long, global = true)]
    k: Option<usize>,
}

fn parse_scheme(s: &str) -> Result<ConcatScheme, String> {
    s.parse().map_err(|e: docrel::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Harvest Wikidata relations, join them with a corpus and write pairs plus manifest.
    BuildDataset {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Output directory for pairs.jsonl and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-property harvest cache (default: <out>/cache).
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Train PV-DBOW document vectors on a corpus.
    TrainEmbeddings {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute document vectors with the selected embedder.
    Embed {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Pretrained word vectors (avgglove).
        #[arg(long)]
        word_vectors: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-fold train/evaluate one embedder and scheme, or all schemes with --grid.
    Experiment {
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Precomputed document vectors; computed from the corpus otherwise.
        #[arg(long)]
        doc_vectors: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        word_vectors: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run every concatenation scheme, one subdirectory each.
        #[arg(long)]
        grid: bool,
        /// Skip training the final model on all pairs.
        #[arg(long)]
        no_model: bool,
    },
    /// Rank the relation classes for one document pair.
    Predict {
        seed_id: String,
        target_id: String,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        doc_vectors: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        top: usize,
        /// Print the prediction record as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Re-render experiment results: one cell in full, several as a summary table.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: ReportFormat,
    },
    /// Write a synthetic corpus, pair file and toy word vectors.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Class markers disjoint (separable) or shared within groups (overlapping).
        #[arg(long, default_value = "separable")]
        preset: String,
        #[arg(long)]
        pairs: Option<usize>,
    },
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: docrel::Error| e.to_string())
}

fn run(cli: Cli) -> docrel::Result<()> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(Overrides {
        seed: g.seed,
        scheme: g.scheme,
        embedder: g.embedder,
        k: g.k,
    });
    match cli.command {
        Command::BuildDataset { corpus, out, cache } => commands::build_dataset(&cfg, corpus, out, cache),
        Command::TrainEmbeddings { corpus, out } => commands::train_embeddings(&cfg, corpus, out),
        Command::Embed {
            corpus,
            word_vectors,
            out,
        } => commands::embed(&cfg, corpus, word_vectors, out),
        Command::Experiment {
            pairs,
            doc_vectors,
            corpus,
            word_vectors,
            out,
            grid,
            no_model,
        } => commands::experiment(
            &cfg,
            commands::ExperimentArgs {
                pairs,
                doc_vectors,
                corpus,
                word_vectors,
                out,
                grid,
                no_model,
            },
        ),
        Command::Predict {
            seed_id,
            target_id,
            model,
            doc_vectors,
            top,
            json,
        } => commands::predict(&cfg, &seed_id, &target_id, &model, doc_vectors, top, json),
        Command::Report { dirs, format } => commands::report(&dirs, format),
        Command::Synth { out, preset, pairs } => commands::synth(&cfg, &out, &preset, pairs),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .parse_default_env()
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_environmental() { 2 } else { 1 })
        }
    }
}
