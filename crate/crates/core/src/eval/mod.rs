//! Frame-level and video-level evaluation.

mod auc;
mod report;

pub use auc::{auc, roc_points};
pub use report::{aggregate_video, evaluate, EvalReport, ScoredFrame, VideoScore};
