use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpfake::model::predict_image_n;
use warpfake::rng;
use warpfake::synth::Label;

use super::train::load_checkpoint;
use super::write_run_info;
use crate::config::RunConfig;
use crate::io::write_jsonl;
use crate::manifest::{check_skip_rate, Manifest};

pub const SCORES_FILE: &str = "scores.jsonl";

/// One scored frame. Images without a video id form single-frame videos
/// named after their path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub video_id: String,
    pub frame_index: usize,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    pub image_path: String,
}

/// Scores every frame in `manifest` with the mean over random RoIs and
/// writes `scores.jsonl`.
pub fn score(cfg: &RunConfig, checkpoint: &Path, manifest: &Path, out: &Path) -> Result<Vec<ScoreRecord>> {
    let ck = load_checkpoint(checkpoint)?;
    let net = ck.network();
    let manifest = Manifest::read(manifest)?;
    let (faces, skipped) = manifest.load_faces(&cfg.synth);
    std::fs::create_dir_all(out)?;
    write_jsonl(&out.join("skipped.jsonl"), &skipped)?;
    check_skip_rate(skipped.len(), manifest.entries.len())?;

    let records = faces
        .par_iter()
        .map(|f| {
            let mut r = rng::stream(cfg.seed, &[4, f.line as u64]);
            let score = predict_image_n(net, &f.face.image, &f.face.landmarks, cfg.score.crops, &mut r)?;
            Ok(ScoreRecord {
                video_id: f.entry.video_id.clone().unwrap_or_else(|| f.entry.image_path.clone()),
                frame_index: f.entry.frame_index.unwrap_or(0),
                score,
                label: f.entry.label,
                image_path: f.entry.image_path.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_jsonl(&out.join(SCORES_FILE), &records)?;
    write_run_info(out, "score", cfg)?;
    Ok(records)
}
