//! Subcommand implementations. Each writes its artifacts into an output
//! directory together with a `run.json` recording the seed, config hash and
//! full effective configuration.

mod eval;
mod score;
mod synth;
mod template;
mod train;

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::config::RunConfig;
use crate::io::write_json_pretty;

pub use eval::{eval, read_scored_frames};
pub use score::{score, ScoreRecord, SCORES_FILE};
pub use synth::{synth, SynthRecord, SynthSummary};
pub use template::{inspect_template, TemplateExport};
pub use train::{load_checkpoint, train, CHECKPOINT_FILE, LOG_FILE};

pub const RUN_INFO_FILE: &str = "run.json";

#[derive(Serialize)]
struct RunInfo<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config_hash: String,
    config: &'a RunConfig,
}

fn write_run_info(out: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    let info = RunInfo {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config_hash: cfg.hash_hex(),
        config: cfg,
    };
    write_json_pretty(&out.join(RUN_INFO_FILE), &info)
}
