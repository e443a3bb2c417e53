use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FaceTemplate;
use crate::imaging::{GaussianKernel, JitterRanges, KernelSpec, ShapeMode};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeModeProbs {
    pub whole_face: f64,
    pub convex_polygon: f64,
}

impl Default for ShapeModeProbs {
    fn default() -> Self {
        Self { whole_face: 0.5, convex_polygon: 0.5 }
    }
}

impl ShapeModeProbs {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ShapeMode {
        if rng.random::<f64>() < self.whole_face {
            ShapeMode::WholeFace
        } else {
            ShapeMode::ConvexPolygon
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Alignment scales, as multiples of `template_size`.
    pub scales: Vec<f64>,
    /// Side in pixels of the aligned face at scale 1.
    pub template_size: usize,
    pub blur_kernel: KernelSpec,
    pub shape_mode_probs: ShapeModeProbs,
    pub jitter: JitterRanges,
    /// Feather radius for the composite mask.
    pub feather_px: usize,
    /// Probability that a negative is composited with a hard edge instead.
    pub hard_edge_prob: f64,
    /// Side of the square network input cut from each RoI.
    pub roi_size: usize,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            scales: vec![0.5, 0.75, 1.0, 1.25],
            template_size: 128,
            blur_kernel: KernelSpec { size: 5, sigma: 1.1 },
            shape_mode_probs: ShapeModeProbs::default(),
            jitter: JitterRanges::default(),
            feather_px: 3,
            hard_edge_prob: 0.25,
            roi_size: super::DEFAULT_ROI_SIZE,
            rng_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::InvalidConfig("at least one alignment scale is required".into()));
        }
        if let Some(s) = self.scales.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("alignment scales must be positive, got {s}")));
        }
        if self.template_size == 0 || self.roi_size == 0 {
            return Err(Error::InvalidConfig("template_size and roi_size must be positive".into()));
        }
        self.kernel()?;
        let p = self.shape_mode_probs;
        if !(p.whole_face >= 0.0 && p.convex_polygon >= 0.0) || (p.whole_face + p.convex_polygon - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "shape mode probabilities must be non-negative and sum to 1, got {} + {}",
                p.whole_face, p.convex_polygon
            )));
        }
        if !(0.0..=1.0).contains(&self.hard_edge_prob) {
            return Err(Error::InvalidConfig(format!("hard_edge_prob {} outside [0, 1]", self.hard_edge_prob)));
        }
        self.jitter.validate()
    }

    pub fn kernel(&self) -> Result<GaussianKernel> {
        if self.blur_kernel.size == 1 {
            return Ok(GaussianKernel::identity());
        }
        GaussianKernel::new(self.blur_kernel.size, self.blur_kernel.sigma)
    }

    pub fn template(&self) -> FaceTemplate {
        FaceTemplate::new(self.template_size)
    }
}
