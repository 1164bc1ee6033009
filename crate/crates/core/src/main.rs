use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ontoembed::pipeline::{self, Mode, PipelineConfig};

/// Ontology corpus generation, skip-gram embeddings and link-prediction evaluation.
#[derive(Debug, Parser)]
#[command(name = "ontoembed", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Pipeline config file (flat `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `workers`; 1 gives reproducible training.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Overrides `output`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, filter and saturate the ontology; write the sentence corpus.
    Corpus,
    /// Train the plain-text model used to initialise `embed`.
    Pretrain,
    /// Train embeddings on the corpus.
    Embed,
    /// Cosine scores for the evaluation pairs.
    Similarity,
    /// Resnik best-match-average scores for the evaluation pairs.
    Resnik,
    /// Train the pair classifier and score the evaluation pairs.
    Classify,
    /// ROC curves and AUC for every scored method.
    Evaluate,
    /// One corpus/embedding/cosine run per annotation property.
    Ablate {
        /// Comma-separated aliases or property IRIs; defaults to the config's
        /// `ablate_properties`. Pass an empty value for a single run without
        /// annotations.
        #[arg(long, value_delimiter = ',')]
        properties: Option<Vec<String>>,
    },
    /// Every stage plus the manifest.
    All,
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let path = cli.config.ok_or((2, "--config is required".to_string()))?;
    let mut cfg = PipelineConfig::from_file(&path).map_err(|e| (2, e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(workers) = cli.workers {
        cfg.set_workers(workers);
    }
    if let Some(output) = cli.output {
        cfg.output = output;
    }
    cfg.validate().map_err(|e| (2, e.to_string()))?;

    let stage_err = |e: pipeline::StageError| (e.exit_code() as u8, e.to_string());
    let mode = match cli.command {
        None => cfg.mode,
        Some(Command::Corpus) => Mode::Corpus,
        Some(Command::Pretrain) => Mode::Pretrain,
        Some(Command::Embed) => Mode::Embed,
        Some(Command::Similarity) => Mode::Similarity,
        Some(Command::Resnik) => Mode::Resnik,
        Some(Command::Classify) => Mode::Classify,
        Some(Command::Evaluate) => Mode::Evaluate,
        Some(Command::All) => Mode::All,
        Some(Command::Ablate { properties }) => {
            let props: Vec<String> = properties
                .unwrap_or_else(|| cfg.ablate_properties.clone())
                .into_iter()
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect();
            let rows = pipeline::cmd_ablate(&cfg, &props).map_err(stage_err)?;
            for r in rows {
                println!("{}\t{:.4}", r.property, r.auc);
            }
            return Ok(());
        }
    };
    pipeline::run_mode(&cfg, mode).map_err(stage_err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
