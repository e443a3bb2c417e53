use rand::Rng;

use super::network::Network;
use crate::error::Result;
use crate::geometry::{ImageBuffer, LandmarkSet};
use crate::synth::{crop_resize, sample_roi, RoiSpec};

/// Number of random RoIs averaged per image at inference.
pub const INFERENCE_CROPS: usize = 10;

/// Anything that maps square crops to fake probabilities.
pub trait Scorer: Sync {
    fn input_size(&self) -> usize;
    fn score(&self, crops: &[ImageBuffer]) -> Result<Vec<f64>>;
}

impl Scorer for Network {
    fn input_size(&self) -> usize {
        self.arch().input_size
    }

    fn score(&self, crops: &[ImageBuffer]) -> Result<Vec<f64>> {
        self.forward(crops)
    }
}

/// Mean fake probability over [`INFERENCE_CROPS`] randomly sampled RoIs.
pub fn predict_image<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    image: &ImageBuffer,
    landmarks: &LandmarkSet,
    rng: &mut R,
) -> Result<f64> {
    predict_image_n(scorer, image, landmarks, INFERENCE_CROPS, rng)
}

/// Mean fake probability over `n_crops` randomly sampled RoIs.
pub fn predict_image_n<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    image: &ImageBuffer,
    landmarks: &LandmarkSet,
    n_crops: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_crops == 0 {
        return Err(crate::error::Error::InvalidConfig("at least one inference crop is required".into()));
    }
    let rois =
        (0..n_crops).map(|_| sample_roi(landmarks, image.width(), image.height(), rng)).collect::<Result<Vec<_>>>()?;
    predict_with_rois(scorer, image, &rois)
}

/// Mean fake probability over the given RoIs.
pub fn predict_with_rois<S: Scorer + ?Sized>(scorer: &S, image: &ImageBuffer, rois: &[RoiSpec]) -> Result<f64> {
    let size = scorer.input_size();
    let crops = rois.iter().map(|r| crop_resize(image, r, size)).collect::<Result<Vec<_>>>()?;
    let scores = scorer.score(&crops)?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
