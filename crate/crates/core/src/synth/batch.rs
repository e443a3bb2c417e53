use std::borrow::Borrow;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SynthConfig;
use super::negative::make_negative;
use super::roi::{crop_resize, face_box, roi_with_margins, sample_roi};
use crate::error::{Error, Result};
use crate::geometry::{estimate_alignment, invert, ImageBuffer, LandmarkSet};
use crate::imaging::{apply_color_jitter, convex_hull};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real = 0,
    Fake = 1,
}

impl Label {
    pub fn target(self) -> f64 {
        self as u8 as f64
    }
}

/// A pristine face with its landmarks.
#[derive(Clone, Debug)]
pub struct FaceImage {
    pub image: ImageBuffer,
    pub landmarks: LandmarkSet,
    pub source_id: String,
    pub video_id: Option<String>,
}

impl FaceImage {
    /// Checks that negatives and RoIs can be synthesized from this face:
    /// landmarks inside the frame, a non-degenerate alignment at every
    /// scale, and a non-empty face polygon and box.
    pub fn validate(&self, cfg: &SynthConfig) -> Result<()> {
        let (w, h) = self.image.dims();
        self.landmarks.check_within(w, h)?;
        face_box(&self.landmarks)?;
        roi_with_margins(&self.landmarks, w, h, [0.0; 4])?;
        let template = cfg.template();
        for &scale in &cfg.scales {
            let alignment = estimate_alignment(&self.landmarks, &template, scale)?;
            invert(&alignment)?;
            let aligned = self.landmarks.map(|p| alignment.apply(p))?;
            convex_hull(aligned.points())?;
            convex_hull(&aligned.points()[LandmarkSet::INNER_FACE])?;
        }
        Ok(())
    }
}

/// A network input: an RoI crop resized to the configured square size.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub pixels: ImageBuffer,
    pub label: Label,
    pub source_id: String,
    pub video_id: Option<String>,
}

impl AsRef<ImageBuffer> for Sample {
    fn as_ref(&self) -> &ImageBuffer {
        &self.pixels
    }
}

/// Crops one training sample from `face`, first converting it to a negative
/// when `label` is `Fake`. Both classes receive color jitter.
pub fn synthesize_sample<R: Rng + ?Sized>(
    face: &FaceImage,
    label: Label,
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<Sample> {
    let (w, h) = face.image.dims();
    let source = match label {
        Label::Real => face.image.clone(),
        Label::Fake => make_negative(&face.image, &face.landmarks, cfg, rng)?,
    };
    let roi = sample_roi(&face.landmarks, w, h, rng)?;
    let crop = crop_resize(&source, &roi, cfg.roi_size)?;
    let jitter = cfg.jitter.sample(rng);
    Ok(Sample {
        pixels: apply_color_jitter(&crop, &jitter)?,
        label,
        source_id: face.source_id.clone(),
        video_id: face.video_id.clone(),
    })
}

/// Builds a training batch from the first `batch_size` positives: a seeded
/// random half is converted to negatives, the rest stay real, and the
/// batch is shuffled.
///
/// Each sample draws from its own stream keyed by a base seed taken from
/// `rng` and its batch position, so the result does not depend on how the
/// work is scheduled across threads.
pub fn build_batch<F: Borrow<FaceImage> + Sync, R: Rng + ?Sized>(
    positives: &[F],
    batch_size: usize,
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<Vec<Sample>> {
    if batch_size == 0 || batch_size % 2 != 0 {
        return Err(Error::InvalidConfig(format!("batch size must be even and positive, got {batch_size}")));
    }
    if positives.len() < batch_size {
        return Err(Error::InsufficientInput { needed: batch_size, available: positives.len() });
    }
    cfg.validate()?;

    let mut order: Vec<usize> = (0..batch_size).collect();
    order.shuffle(rng);
    let mut labels = vec![Label::Real; batch_size];
    for &i in &order[..batch_size / 2] {
        labels[i] = Label::Fake;
    }
    let base = rng.next_u64();
    let mut samples = (0..batch_size)
        .into_par_iter()
        .map(|i| synthesize_sample(positives[i].borrow(), labels[i], cfg, &mut rng::stream(base, &[i as u64])))
        .collect::<Result<Vec<_>>>()?;
    samples.shuffle(rng);
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FaceTemplate, Point};

    fn faces(n: usize) -> Vec<FaceImage> {
        (0..n)
            .map(|i| {
                let k = i as f64;
                let image = ImageBuffer::from_fn(72, 72, |x, y, c| {
                    (0.5 + 0.3 * ((x as f64 * 0.4 + k).sin() * (y as f64 * 0.3 + c as f64).cos())) as f32
                });
                FaceImage {
                    image,
                    landmarks: FaceTemplate::default().place(44.0, Point::new(14.0 + k % 3.0, 12.0)),
                    source_id: format!("face{i}"),
                    video_id: None,
                }
            })
            .collect()
    }

    fn small_cfg() -> SynthConfig {
        SynthConfig { template_size: 48, roi_size: 32, ..SynthConfig::default() }
    }

    #[test]
    fn half_the_batch_is_fake() {
        let pos = faces(64);
        let cfg = small_cfg();
        for b in 0..4u64 {
            let batch = build_batch(&pos, 64, &cfg, &mut rng::stream(b, &[])).unwrap();
            assert_eq!(batch.len(), 64);
            assert_eq!(batch.iter().filter(|s| s.label == Label::Fake).count(), 32);
            assert!(batch.iter().all(|s| s.pixels.dims() == (32, 32)));
        }
    }

    #[test]
    fn default_roi_is_224() {
        let pos = faces(2);
        let cfg = SynthConfig { template_size: 48, ..SynthConfig::default() };
        let batch = build_batch(&pos, 2, &cfg, &mut rng::stream(0, &[])).unwrap();
        assert!(batch.iter().all(|s| s.pixels.dims() == (224, 224)));
    }

    #[test]
    fn small_batch_is_deterministic() {
        let pos = faces(2);
        let cfg = small_cfg();
        let a = build_batch(&pos, 2, &cfg, &mut rng::stream(9, &[])).unwrap();
        let b = build_batch(&pos, 2, &cfg, &mut rng::stream(9, &[])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().filter(|s| s.label == Label::Fake).count(), 1);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let pos = faces(8);
        let cfg = small_cfg();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| build_batch(&pos, 8, &cfg, &mut rng::stream(5, &[])).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn batch_errors() {
        let pos = faces(3);
        let cfg = small_cfg();
        assert!(matches!(
            build_batch(&pos, 4, &cfg, &mut rng::stream(0, &[])),
            Err(Error::InsufficientInput { needed: 4, available: 3 })
        ));
        assert!(build_batch(&pos, 3, &cfg, &mut rng::stream(0, &[])).is_err());
    }
}
