use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use warpfake::model::{self, LogRow, ModelCheckpoint, TrainState};
use warpfake::synth::{FaceImage, Label};

use super::write_run_info;
use crate::config::RunConfig;
use crate::io::{write_atomic, write_jsonl};
use crate::manifest::{check_skip_rate, Manifest};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const LOG_FILE: &str = "train_log.csv";

#[derive(Serialize, Deserialize)]
struct CsvRow {
    step: u64,
    lr: f64,
    loss: f64,
    stage: u8,
    epoch: usize,
}

impl From<&LogRow> for CsvRow {
    fn from(r: &LogRow) -> Self {
        Self { step: r.step, lr: r.lr, loss: r.loss, stage: r.stage, epoch: r.epoch }
    }
}

fn write_log(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["step", "lr", "loss", "stage", "epoch"])?;
    }
    write_atomic(path, &w.into_inner()?)
}

fn read_log(path: &Path) -> Result<Vec<CsvRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn load_checkpoint(path: &Path) -> Result<ModelCheckpoint> {
    let bytes = std::fs::read(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    ModelCheckpoint::from_bytes(&bytes).with_context(|| format!("loading checkpoint {}", path.display()))
}

/// Seconds between intermediate checkpoint saves.
const SAVE_INTERVAL_SECS: u64 = 60;

/// Trains on the pristine faces of `manifest` (entries labeled `fake` are
/// ignored). The checkpoint and log are rewritten at epoch boundaries at
/// most once a minute and always at the end, so an interrupted run can
/// continue with `resume`.
pub fn train(cfg: &RunConfig, manifest: &Path, out: &Path, resume: Option<&Path>) -> Result<TrainState> {
    let mut state = match resume {
        Some(path) => {
            let ck = load_checkpoint(path)?;
            if ck.network().arch() != &cfg.model {
                bail!("checkpoint architecture {:?} differs from the configured {:?}", ck.network().arch(), cfg.model);
            }
            if ck.seed != cfg.seed || ck.config_hash != cfg.hash() {
                log::warn!("resuming a checkpoint written with a different seed or configuration");
            }
            ck.state
        }
        None => TrainState::new(cfg.model.clone(), cfg.seed)?,
    };

    let manifest = Manifest::read(manifest)?;
    let (loaded, skipped) = manifest.load_faces(&cfg.synth);
    std::fs::create_dir_all(out)?;
    write_jsonl(&out.join("skipped.jsonl"), &skipped)?;
    check_skip_rate(skipped.len(), manifest.entries.len())?;
    let faces: Vec<FaceImage> =
        loaded.into_iter().filter(|f| f.entry.label != Some(Label::Fake)).map(|f| f.face).collect();
    log::info!("training on {} pristine faces", faces.len());

    let log_path = out.join(LOG_FILE);
    let mut rows: Vec<CsvRow> = if resume.is_some() {
        read_log(&log_path)?.into_iter().filter(|r| r.step < state.step).collect()
    } else {
        Vec::new()
    };
    let save = |state: &TrainState, rows: &[CsvRow]| -> Result<()> {
        let ck = ModelCheckpoint::new(state.clone(), cfg.seed, cfg.hash());
        write_atomic(&out.join(CHECKPOINT_FILE), &ck.to_bytes())?;
        write_log(&log_path, rows)
    };

    let (total1, total2) = (cfg.train.max_epochs, cfg.train.hard_mine_epochs);
    let mut last_save = Instant::now();
    loop {
        let mut tc = cfg.train.clone();
        if state.stage1_epochs < total1 {
            tc.max_epochs = state.stage1_epochs + 1;
            tc.hard_mine_epochs = state.stage2_epochs;
        } else if state.stage2_epochs < total2 {
            tc.hard_mine_epochs = state.stage2_epochs + 1;
        } else {
            break;
        }
        let first = rows.len();
        state = model::train(&faces, &cfg.synth, &tc, state, &mut |r| rows.push(r.into()))?;
        let epoch_rows = &rows[first..];
        let mean = epoch_rows.iter().map(|r| r.loss).sum::<f64>() / epoch_rows.len().max(1) as f64;
        log::debug!(
            "stage 1 epoch {} / stage 2 epoch {}: {} steps, mean loss {mean:.4}",
            state.stage1_epochs,
            state.stage2_epochs,
            epoch_rows.len()
        );
        if last_save.elapsed().as_secs() >= SAVE_INTERVAL_SECS {
            save(&state, &rows)?;
            last_save = Instant::now();
        }
    }
    save(&state, &rows)?;
    write_run_info(out, "train", cfg)?;
    Ok(state)
}
