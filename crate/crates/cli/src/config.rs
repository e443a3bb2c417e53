use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use warpfake::model::{CnnArchitecture, TrainConfig, INFERENCE_CROPS};
use warpfake::synth::SynthConfig;

/// Options for `synth` when materializing a labeled dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterializeOptions {
    /// Fraction of faces (or whole videos) converted to negatives.
    pub fake_ratio: f64,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        Self { fake_ratio: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreOptions {
    /// Random RoIs averaged per frame.
    pub crops: usize,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self { crops: INFERENCE_CROPS }
    }
}

/// Everything a run depends on besides its inputs. Loaded from TOML; unknown
/// keys are rejected. The top-level `seed` is copied into the synthesis and
/// training sections so there is a single source of randomness.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub synth: SynthConfig,
    pub train: TrainConfig,
    pub model: CnnArchitecture,
    pub materialize: MaterializeOptions,
    pub score: ScoreOptions,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads the config file (defaults if `path` is `None`), applies a seed
    /// override and validates the result.
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Self::from_toml(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Self::default(),
        };
        if let Some(seed) = seed {
            cfg.seed = seed;
        }
        cfg.synth.rng_seed = cfg.seed;
        cfg.train.seed = cfg.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.synth.validate()?;
        self.train.validate()?;
        self.model.validate()?;
        ensure!(
            self.synth.roi_size == self.model.input_size,
            "synth.roi_size ({}) must equal model.input_size ({})",
            self.synth.roi_size,
            self.model.input_size
        );
        ensure!((0.0..=1.0).contains(&self.materialize.fake_ratio), "materialize.fake_ratio must lie in [0, 1]");
        ensure!(self.score.crops >= 1, "score.crops must be at least 1");
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, truncated to 64 bits.
    pub fn hash(&self) -> u64 {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        u64::from_be_bytes(digest[..8].try_into().unwrap())
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("sed = 3").is_err());
        assert!(RunConfig::from_toml("[train]\nbatchsize = 3").is_err());
        let cfg =
            RunConfig::from_toml("seed = 3\n[train]\nbatch_size = 8\n[model]\ninput_size = 64\n[synth]\nroi_size = 64")
                .unwrap();
        assert_eq!(cfg.train.batch_size, 8);
        cfg.validate().unwrap();
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.train.lr0 = 0.002;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash_hex().len(), 16);
    }

    #[test]
    fn readme_example_is_the_default() {
        let readme = include_str!("../../../README.md");
        let start = readme.find("```toml\n").unwrap() + 8;
        let end = start + readme[start..].find("```").unwrap();
        assert_eq!(RunConfig::from_toml(&readme[start..end]).unwrap(), RunConfig::default());
    }

    #[test]
    fn size_mismatch_rejected() {
        let mut cfg = RunConfig::default();
        cfg.model.input_size = 64;
        assert!(cfg.validate().is_err());
    }
}
