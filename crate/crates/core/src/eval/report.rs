use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::auc::auc;
use crate::error::{Error, Result};
use crate::synth::Label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredFrame {
    pub video_id: String,
    pub frame_index: usize,
    pub score: f64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoScore {
    pub video_id: String,
    pub n_frames: usize,
    pub aggregated_score: f64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub frame_auc: f64,
    pub video_auc: f64,
    pub videos: Vec<VideoScore>,
}

/// Mean of the top third (rounded up) of a video's frame scores.
pub fn aggregate_video(frame_scores: &[f64]) -> Result<f64> {
    if frame_scores.is_empty() {
        return Err(Error::EmptyVideo);
    }
    if let Some(&bad) = frame_scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(bad));
    }
    let mut sorted = frame_scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = frame_scores.len().div_ceil(3);
    Ok(sorted[..k].iter().sum::<f64>() / k as f64)
}

/// Frame-level AUC over every frame and video-level AUC over top-third
/// aggregates. Videos are listed in `video_id` order.
pub fn evaluate(frames: &[ScoredFrame]) -> Result<EvalReport> {
    if let Some(f) = frames.iter().find(|f| !(f.score.is_finite() && (0.0..=1.0).contains(&f.score))) {
        return Err(Error::InvalidScore(f.score));
    }
    let mut groups: BTreeMap<&str, (Label, Vec<f64>)> = BTreeMap::new();
    for f in frames {
        let entry = groups.entry(&f.video_id).or_insert((f.label, Vec::new()));
        if entry.0 != f.label {
            return Err(Error::InconsistentVideoLabel(f.video_id.clone()));
        }
        entry.1.push(f.score);
    }

    let scores: Vec<f64> = frames.iter().map(|f| f.score).collect();
    let labels: Vec<Label> = frames.iter().map(|f| f.label).collect();
    let frame_auc = auc(&scores, &labels)?;

    let videos = groups
        .into_iter()
        .map(|(id, (label, s))| {
            Ok(VideoScore {
                video_id: id.to_string(),
                n_frames: s.len(),
                aggregated_score: aggregate_video(&s)?,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let vs: Vec<f64> = videos.iter().map(|v| v.aggregated_score).collect();
    let vl: Vec<Label> = videos.iter().map(|v| v.label).collect();
    let video_auc = auc(&vs, &vl).map_err(|e| match e {
        Error::SingleClass(_) => Error::SingleClass("video"),
        other => other,
    })?;
    Ok(EvalReport { frame_auc, video_auc, videos })
}

impl EvalReport {
    /// Plain-text summary for terminals.
    pub fn table(&self) -> String {
        let width = self.videos.iter().map(|v| v.video_id.len()).max().unwrap_or(0).max(8);
        let mut out = String::new();
        writeln!(out, "frame AUC  {:.4}", self.frame_auc).unwrap();
        writeln!(out, "video AUC  {:.4}", self.video_auc).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "{:<width$}  {:>6}  {:>6}  label", "video", "frames", "score").unwrap();
        for v in &self.videos {
            let label = match v.label {
                Label::Real => "real",
                Label::Fake => "fake",
            };
            writeln!(out, "{:<width$}  {:>6}  {:>6.4}  {label}", v.video_id, v.n_frames, v.aggregated_score).unwrap();
        }
        out
    }
}
