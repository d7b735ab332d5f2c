use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dirlp::cli::{self, AblationAxis, ExperimentConfig};
use dirlp::error::Error;

#[derive(Parser)]
#[command(name = "dirlp", version = cli::build_id(), about = "Directed link prediction experiments")]
struct Args {
    /// Experiment configuration (JSON); defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the configuration's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relabel a raw edge list to dense ids and write dataset statistics.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        features: Option<PathBuf>,
        /// One raw id per line, fixing the dense order.
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Write the train/validation/test edges of every fold.
    Split,
    /// Evaluate the configured heuristics on every fold.
    Heuristic,
    /// Train the configured model on every fold.
    Train {
        /// Random hyperparameter search before training, e.g. `trials=48`.
        #[arg(long, value_parser = parse_search)]
        search: Option<usize>,
    },
    /// Sweep one design axis with everything else fixed.
    Ablate {
        /// encoder, decoder, labeling, sampling or features.
        #[arg(long, value_parser = parse_axis)]
        axis: AblationAxis,
    },
    /// Re-evaluate a saved checkpoint on a fold's test edges.
    Evaluate {
        #[arg(long, default_value_t = 0)]
        fold: usize,
        /// Defaults to `<out>/fold_<fold>/checkpoint.json`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check every module against brute-force oracles and gradients.
    Verify,
}

fn parse_search(s: &str) -> std::result::Result<usize, String> {
    cli::parse_search(s).map_err(|e| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<AblationAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn run(args: Args) -> Result<ExitCode> {
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(Error::Config("--workers must be >= 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting the worker pool")?;
    }
    match &args.command {
        Command::Ingest { edges, features, id_map } => {
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("data"));
            let stats = cli::cmd_ingest(edges, features.as_deref(), id_map.as_deref(), &out)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
        }
        Command::Split => {
            let dir = cli::cmd_split(&config(&args)?)?;
            println!("splits written to {}", dir.display());
        }
        Command::Heuristic => {
            for r in cli::cmd_heuristic(&config(&args)?)? {
                println!("fold {:>2}  {:<10} {:<10} MRR {:.4}  Hits@{} {:.4}", r.fold, r.method, r.selected, r.mrr, r.hits_k, r.hits);
            }
        }
        Command::Train { search } => {
            for r in cli::cmd_train(&config(&args)?, *search)? {
                println!("fold {:>2}  {}  MRR {:.4}  Hits@{} {:.4}", r.fold, r.method, r.mrr, r.hits_k, r.hits);
            }
        }
        Command::Ablate { axis } => {
            for r in cli::cmd_ablate(&config(&args)?, *axis)? {
                println!(
                    "{:<10} MRR {:.4} ± {:.4}  Hits {:.4} ± {:.4}",
                    r.variant, r.mrr_mean, r.mrr_std, r.hits_mean, r.hits_std
                );
            }
        }
        Command::Evaluate { fold, checkpoint } => {
            let s = cli::cmd_evaluate(&config(&args)?, checkpoint.as_deref(), *fold)?;
            println!("fold {}  {}  MRR {:.4}  Hits@{} {:.4}", s.fold, s.method, s.mrr, s.hits_k, s.hits);
        }
        Command::Verify => {
            let report = cli::cmd_verify(args.seed.unwrap_or(0), args.out.as_deref())?;
            for check in &report.checks {
                println!("{check}");
            }
            let failed = report.failures().count();
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", report.checks.len());
                return Ok(ExitCode::from(4));
            }
            println!("all {} checks passed", report.checks.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(2, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
