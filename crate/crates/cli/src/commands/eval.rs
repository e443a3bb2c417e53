use std::path::Path;

use anyhow::{Context, Result};
use warpfake::eval::{evaluate, roc_points, EvalReport, ScoredFrame};

use super::write_run_info;
use crate::config::RunConfig;
use crate::io::{write_atomic, write_json_pretty};

pub fn read_scored_frames(path: &Path) -> Result<Vec<ScoredFrame>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}: line {}", path.display(), i + 1)))
        .collect()
}

/// Writes `report.json` and `roc.csv` for a scored-frame JSONL file.
pub fn eval(cfg: &RunConfig, scores: &Path, out: &Path) -> Result<EvalReport> {
    let frames = read_scored_frames(scores)?;
    let report = evaluate(&frames)?;
    let s: Vec<f64> = frames.iter().map(|f| f.score).collect();
    let l: Vec<_> = frames.iter().map(|f| f.label).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["fpr", "tpr"])?;
    for (fpr, tpr) in roc_points(&s, &l)? {
        w.serialize((fpr, tpr))?;
    }
    std::fs::create_dir_all(out)?;
    write_json_pretty(&out.join("report.json"), &report)?;
    write_atomic(&out.join("roc.csv"), &w.into_inner()?)?;
    write_run_info(out, "eval", cfg)?;
    Ok(report)
}
