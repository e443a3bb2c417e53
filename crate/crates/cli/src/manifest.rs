use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use warpfake::geometry::LandmarkSet;
use warpfake::synth::{FaceImage, Label, SynthConfig};

use crate::io::read_png;

/// One line of a JSONL manifest. Paths are relative to the manifest's
/// directory unless absolute. Extra keys (provenance written by `synth`, for
/// instance) are ignored on read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_path: String,
    pub landmarks_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_index: Option<usize>,
}

/// A manifest line that could not be used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub line: usize,
    pub image_path: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct LoadedFace {
    /// Zero-based line number in the manifest; keys per-entry random streams.
    pub line: usize,
    pub entry: ManifestEntry,
    pub face: FaceImage,
}

pub struct Manifest {
    pub base: PathBuf,
    pub entries: Vec<(usize, Result<ManifestEntry, String>)>,
}

/// Largest tolerated fraction of skipped entries.
pub const MAX_SKIP_FRACTION: f64 = 0.1;

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i, serde_json::from_str(l).map_err(|e| format!("malformed entry: {e}"))))
            .collect();
        Ok(Self { base, entries })
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// Decodes every entry in parallel. Entries that fail to load, or whose
    /// landmarks cannot drive synthesis under `cfg`, are returned as skips.
    pub fn load_faces(&self, cfg: &SynthConfig) -> (Vec<LoadedFace>, Vec<Skipped>) {
        let results: Vec<Result<LoadedFace, Skipped>> = self
            .entries
            .par_iter()
            .map(|(line, entry)| {
                let entry = entry.clone().map_err(|reason| Skipped { line: *line, image_path: None, reason })?;
                self.load_one(*line, &entry, cfg).map_err(|e| Skipped {
                    line: *line,
                    image_path: Some(entry.image_path.clone()),
                    reason: format!("{e:#}"),
                })
            })
            .collect();
        let mut faces = Vec::new();
        let mut skipped = Vec::new();
        for r in results {
            match r {
                Ok(f) => faces.push(f),
                Err(s) => {
                    log::warn!("skipping manifest line {}: {}", s.line + 1, s.reason);
                    skipped.push(s);
                }
            }
        }
        (faces, skipped)
    }

    fn load_one(&self, line: usize, entry: &ManifestEntry, cfg: &SynthConfig) -> Result<LoadedFace> {
        let image = read_png(&self.resolve(&entry.image_path))?;
        let lm_path = self.resolve(&entry.landmarks_path);
        let text = std::fs::read_to_string(&lm_path).with_context(|| format!("reading {}", lm_path.display()))?;
        let landmarks = LandmarkSet::parse_sidecar(&text)?;
        let face =
            FaceImage { image, landmarks, source_id: entry.image_path.clone(), video_id: entry.video_id.clone() };
        face.validate(cfg)?;
        Ok(LoadedFace { line, entry: entry.clone(), face })
    }
}

/// Fails when more than [`MAX_SKIP_FRACTION`] of `total` entries were skipped.
pub fn check_skip_rate(skipped: usize, total: usize) -> Result<()> {
    if total > 0 && skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
        bail!("{skipped} of {total} manifest entries were skipped (limit {:.0}%)", MAX_SKIP_FRACTION * 100.0);
    }
    Ok(())
}
