use std::collections::HashMap;
use std::path::Path;

use anyhow::Result;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpfake::rng;
use warpfake::synth::{make_negative, Label};

use super::write_run_info;
use crate::config::RunConfig;
use crate::io::{encode_png, write_atomic, write_jsonl};
use crate::manifest::{check_skip_rate, LoadedFace, Manifest, ManifestEntry};

/// A line of the manifest written by `synth`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthRecord {
    #[serde(flatten)]
    pub entry: ManifestEntry,
    pub source_image: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthSummary {
    pub real: usize,
    pub fake: usize,
    pub skipped: usize,
}

/// Frames of one video share a label, so the fake ratio is applied to units:
/// whole videos, or single images without a video id.
fn fake_lines(faces: &[LoadedFace], ratio: f64, seed: u64) -> Vec<bool> {
    let mut unit_of: HashMap<&str, usize> = HashMap::new();
    let mut units = 0;
    let unit: Vec<usize> = faces
        .iter()
        .map(|f| match &f.entry.video_id {
            Some(v) => *unit_of.entry(v.as_str()).or_insert_with(|| {
                units += 1;
                units - 1
            }),
            None => {
                units += 1;
                units - 1
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..units).collect();
    order.shuffle(&mut rng::stream(seed, &[3]));
    let n_fake = (units as f64 * ratio).round() as usize;
    let mut fake = vec![false; units];
    for &u in &order[..n_fake] {
        fake[u] = true;
    }
    unit.into_iter().map(|u| fake[u]).collect()
}

/// Materializes a labeled dataset: a seeded share of the input faces is
/// replaced by synthesized negatives. Images and landmark sidecars are
/// written under `images/` and `landmarks/`, indexed by manifest line, and
/// listed in `manifest.jsonl`. Unusable inputs go to `skipped.jsonl`.
pub fn synth(cfg: &RunConfig, manifest: &Path, out: &Path) -> Result<SynthSummary> {
    let manifest = Manifest::read(manifest)?;
    let (faces, skipped) = manifest.load_faces(&cfg.synth);
    std::fs::create_dir_all(out)?;
    write_jsonl(&out.join("skipped.jsonl"), &skipped)?;
    check_skip_rate(skipped.len(), manifest.entries.len())?;

    let fake = fake_lines(&faces, cfg.materialize.fake_ratio, cfg.seed);
    let hash = cfg.hash_hex();
    let outputs: Vec<(SynthRecord, Vec<u8>)> = faces
        .par_iter()
        .zip(&fake)
        .map(|(f, &is_fake)| {
            let image = if is_fake {
                let mut r = rng::stream(cfg.seed, &[3, 1 + f.line as u64]);
                make_negative(&f.face.image, &f.face.landmarks, &cfg.synth, &mut r)?
            } else {
                f.face.image.clone()
            };
            let record = SynthRecord {
                entry: ManifestEntry {
                    image_path: format!("images/{:06}.png", f.line),
                    landmarks_path: format!("landmarks/{:06}.txt", f.line),
                    label: Some(if is_fake { Label::Fake } else { Label::Real }),
                    video_id: f.entry.video_id.clone(),
                    frame_index: f.entry.frame_index,
                },
                source_image: f.entry.image_path.clone(),
                seed: cfg.seed,
                config_hash: hash.clone(),
            };
            Ok((record, encode_png(&image)?))
        })
        .collect::<Result<_>>()?;

    for ((record, png), f) in outputs.iter().zip(&faces) {
        write_atomic(&out.join(&record.entry.image_path), png)?;
        write_atomic(&out.join(&record.entry.landmarks_path), f.face.landmarks.to_sidecar().as_bytes())?;
    }
    let records: Vec<&SynthRecord> = outputs.iter().map(|(r, _)| r).collect();
    write_jsonl(&out.join("manifest.jsonl"), &records)?;
    write_run_info(out, "synth", cfg)?;

    let n_fake = fake.iter().filter(|&&f| f).count();
    let summary = SynthSummary { real: faces.len() - n_fake, fake: n_fake, skipped: skipped.len() };
    log::info!("synth: {} real, {} fake, {} skipped", summary.real, summary.fake, summary.skipped);
    Ok(summary)
}
