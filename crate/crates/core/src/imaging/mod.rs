//! Pixel-level primitives for negative synthesis: Gaussian blur, color
//! jitter, polygon masks and masked compositing.

mod blur;
mod composite;
mod jitter;
mod mask;

pub use blur::{blur_plane, gaussian_blur, GaussianKernel, KernelSpec};
pub use composite::{composite, feather};
pub use jitter::{apply_color_jitter, ColorJitterParams, JitterRanges};
pub use mask::{convex_hull, fill_convex_polygon, polygon_mask, Mask, ShapeMode};
