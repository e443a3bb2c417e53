use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use warpfake_cli::commands;
use warpfake_cli::RunConfig;

/// Synthesize face-warping artifacts, train a detector and evaluate it.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "WARPFAKE_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a labeled real/fake dataset from pristine faces.
    Synth {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the detector on pristine faces, synthesizing negatives on the fly.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Checkpoint to continue from.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Score every frame of a manifest with a trained checkpoint.
    Score {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frame- and video-level AUC for a scores file.
    Eval {
        /// Scored frames as written by `score`.
        #[arg(long, alias = "manifest")]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the alignment template; with --out also write files and a preview.
    InspectTemplate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker pool")?;
    }
    let cfg = RunConfig::load(cli.config.as_deref(), cli.seed)?;
    match cli.command {
        Command::Synth { manifest, out } => {
            let s = commands::synth(&cfg, &manifest, &out)?;
            println!("{} real, {} fake, {} skipped", s.real, s.fake, s.skipped);
        }
        Command::Train { manifest, out, resume } => {
            let state = commands::train(&cfg, &manifest, &out, resume.as_deref())?;
            println!(
                "trained {} steps ({} + {} epochs); checkpoint {}",
                state.step,
                state.stage1_epochs,
                state.stage2_epochs,
                out.join(commands::CHECKPOINT_FILE).display()
            );
        }
        Command::Score { checkpoint, manifest, out } => {
            let records = commands::score(&cfg, &checkpoint, &manifest, &out)?;
            println!("scored {} frames", records.len());
        }
        Command::Eval { scores, out } => {
            let report = commands::eval(&cfg, &scores, &out)?;
            print!("{}", report.table());
        }
        Command::InspectTemplate { out } => {
            let export = commands::inspect_template(&cfg, out.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&export)?);
        }
    }
    Ok(())
}
