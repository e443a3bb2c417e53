//! Synthesis of affine face-warping artifacts, a compact CNN that learns to
//! detect them, and frame/video-level AUC evaluation.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: landmarks, the canonical face template, similarity
//!   transforms and bilinear warping.
//! * [`imaging`]: Gaussian blur, color jitter, polygon masks, compositing.
//! * [`synth`]: the negative-example generator, RoI sampling, batch building.
//! * [`model`]: the CNN, SGD with a stepped learning-rate schedule,
//!   hard-example mining, multi-crop inference and checkpoints.
//! * [`eval`]: exact AUC, top-third video aggregation and reports.

pub mod error;
pub mod eval;
pub mod geometry;
pub mod imaging;
pub mod model;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{ImageBuffer, LandmarkSet, Point, SimilarityTransform};
