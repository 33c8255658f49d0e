use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use idsemble::bench::{read_bundle, run_and_emit, ExperimentConfig};
use idsemble::metrics::{ranking_csv, render_ranking_text, render_runtime_text, RuntimeRecord};

#[derive(Parser)]
#[command(name = "idsemble", version, about = "Ensemble intrusion-detection benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides IDSEMBLE_OUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Thread budget (overrides IDSEMBLE_THREADS and the config).
        #[arg(long)]
        threads: Option<usize>,
        /// Master seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config without training anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the ranking of an emitted bundle.
    Report {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
    Json,
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let mut cfg =
        ExperimentConfig::from_file(path).with_context(|| format!("reading config {}", path.display()))?;
    cfg.apply_env_overrides()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, threads, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(t) = threads {
                cfg.threads = Some(t);
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate()?;
            let (bundle, dir) = run_and_emit(&cfg, out.as_deref())?;
            print!("{}", render_ranking_text(&bundle.ranking));
            if bundle.runtime_table {
                let rt: Vec<RuntimeRecord> = bundle.methods.iter().filter_map(|m| m.runtime.clone()).collect();
                println!();
                print!("{}", render_runtime_text(&rt));
            }
            for m in bundle.methods.iter().filter(|m| m.error.is_some()) {
                eprintln!("method `{}` failed: {}", m.name, m.error.as_deref().unwrap_or_default());
            }
            println!("\nbundle written to {}", dir.display());
            if bundle.leakage_violations > 0 {
                bail!("{} leakage violations recorded", bundle.leakage_violations);
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            cfg.validate()?;
            println!("ok: {} methods, config hash {}", cfg.methods.len(), cfg.hash());
        }
        Command::Report { bundle, format } => {
            let b = read_bundle(&bundle).with_context(|| format!("reading bundle {}", bundle.display()))?;
            match format {
                Format::Text => print!("{}", render_ranking_text(&b.ranking)),
                Format::Csv => print!("{}", ranking_csv(&b.ranking, b.runtime_table)?),
                Format::Json => println!("{}", serde_json::to_string_pretty(&b.ranking)?),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
