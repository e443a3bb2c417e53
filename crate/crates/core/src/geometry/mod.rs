//! Landmarks, the canonical face template, similarity transforms and
//! bilinear image warping.

mod buffer;
mod landmarks;
mod template;
mod transform;
mod warp;

pub(crate) use buffer::clamp01;
pub use buffer::{psnr, ImageBuffer, CHANNELS};
pub use landmarks::{LandmarkSet, Point, NUM_LANDMARKS};
pub use template::{FaceTemplate, MEAN_SHAPE};
pub use transform::{estimate_alignment, invert, SimilarityTransform};
pub use warp::{warp, warp_zero_padded};
