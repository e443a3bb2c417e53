use rand::Rng;

use super::config::SynthConfig;
use crate::error::Result;
use crate::geometry::{
    estimate_alignment, invert, warp, warp_zero_padded, ImageBuffer, LandmarkSet, SimilarityTransform,
};
use crate::imaging::{composite, feather, gaussian_blur, polygon_mask, Mask, ShapeMode};

/// A synthesized negative together with the choices that produced it.
#[derive(Clone, Debug)]
pub struct Negative {
    pub image: ImageBuffer,
    /// The feathered blend mask, in original-image geometry.
    pub mask: Mask,
    pub scale: f64,
    pub shape_mode: ShapeMode,
    pub feather_px: usize,
    pub alignment: SimilarityTransform,
}

/// Simulates the affine face-warping artifact on a pristine image.
pub fn make_negative<R: Rng + ?Sized>(
    image: &ImageBuffer,
    landmarks: &LandmarkSet,
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<ImageBuffer> {
    make_negative_detailed(image, landmarks, cfg, rng).map(|n| n.image)
}

pub fn make_negative_detailed<R: Rng + ?Sized>(
    image: &ImageBuffer,
    landmarks: &LandmarkSet,
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<Negative> {
    cfg.validate()?;
    landmarks.check_within(image.width(), image.height())?;
    let scale = cfg.scales[rng.random_range(0..cfg.scales.len())];
    let shape_mode = cfg.shape_mode_probs.sample(rng);
    let feather_px = if rng.random::<f64>() < cfg.hard_edge_prob { 0 } else { cfg.feather_px };

    let template = cfg.template();
    let alignment = estimate_alignment(landmarks, &template, scale)?;
    let back = invert(&alignment)?;
    let side = template.aligned_side(scale);
    let (w, h) = image.dims();

    let aligned = warp(image, &alignment, side, side);
    let blurred = gaussian_blur(&aligned, &cfg.kernel()?);
    let rewarped = warp(&blurred, &back, w, h);

    let aligned_landmarks = landmarks.map(|p| alignment.apply(p))?;
    let face_mask = polygon_mask(side, side, &aligned_landmarks, shape_mode)?;
    let footprint: Vec<f32> = warp_zero_padded(face_mask.values(), side, side, &back, w, h)
        .into_iter()
        .map(|v| if v >= 0.5 { 1.0 } else { 0.0 })
        .collect();
    let mask = Mask::new(w, h, footprint)?;

    let image = composite(image, &rewarped, &mask, feather_px)?;
    Ok(Negative { image, mask: feather(&mask, feather_px), scale, shape_mode, feather_px, alignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{psnr, FaceTemplate, Point};
    use crate::imaging::KernelSpec;
    use crate::rng;

    fn textured_face(seed: u64) -> (ImageBuffer, LandmarkSet) {
        let mut r = rng::stream(seed, &[]);
        let phase: Vec<f64> = (0..6).map(|_| r.random::<f64>() * 6.28).collect();
        let img = ImageBuffer::from_fn(120, 110, |x, y, c| {
            let (xf, yf) = (x as f64, y as f64);
            let v = 0.5
                + 0.2 * (xf * 0.21 + phase[c]).sin() * (yf * 0.17 + phase[c + 3]).cos()
                + 0.1 * ((xf + yf) * 0.05).sin();
            v as f32
        });
        let lm = FaceTemplate::default().place(70.0, Point::new(22.0, 18.0));
        (img, lm)
    }

    #[test]
    fn output_matches_input_outside_mask() {
        let (img, lm) = textured_face(1);
        let cfg = SynthConfig::default();
        for seed in 0..10 {
            let neg = make_negative_detailed(&img, &lm, &cfg, &mut rng::stream(seed, &[])).unwrap();
            assert_eq!(neg.image.dims(), img.dims());
            assert!(neg.mask.support() > 0);
            for y in 0..img.height() {
                for x in 0..img.width() {
                    if neg.mask.get(x, y) == 0.0 {
                        assert_eq!(neg.image.pixel(x, y), img.pixel(x, y));
                    }
                }
            }
            assert_ne!(neg.image, img);
        }
    }

    #[test]
    fn convex_polygon_stays_inside_face() {
        let (img, lm) = textured_face(2);
        let cfg = SynthConfig {
            shape_mode_probs: crate::synth::ShapeModeProbs { whole_face: 0.0, convex_polygon: 1.0 },
            hard_edge_prob: 1.0,
            ..SynthConfig::default()
        };
        let neg = make_negative_detailed(&img, &lm, &cfg, &mut rng::stream(3, &[])).unwrap();
        assert_eq!(neg.feather_px, 0);
        // the polygon spans brows to lower lip; rows above the brows and below the chin are untouched
        let brow_top = lm.points()[17..27].iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        for y in 0..(brow_top.floor() as usize).saturating_sub(2) {
            for x in 0..img.width() {
                assert_eq!(neg.mask.get(x, y), 0.0);
                assert_eq!(neg.image.pixel(x, y), img.pixel(x, y));
            }
        }
    }

    #[test]
    fn identity_blur_only_resamples() {
        let (img, lm) = textured_face(4);
        let cfg = SynthConfig {
            blur_kernel: KernelSpec { size: 1, sigma: 1.0 },
            scales: vec![1.5],
            hard_edge_prob: 1.0,
            ..SynthConfig::default()
        };
        let neg = make_negative_detailed(&img, &lm, &cfg, &mut rng::stream(4, &[])).unwrap();
        let p = psnr(&img, &neg.image, |x, y| neg.mask.get(x, y) > 0.0);
        assert!(p >= 35.0, "psnr {p}");
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let (img, lm) = textured_face(5);
        let cfg = SynthConfig::default();
        let a = make_negative(&img, &lm, &cfg, &mut rng::stream(42, &[])).unwrap();
        let b = make_negative(&img, &lm, &cfg, &mut rng::stream(42, &[])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_landmarks_error() {
        let (img, _) = textured_face(6);
        let lm = LandmarkSet::new([Point::new(30.0, 30.0); 68]).unwrap();
        assert!(make_negative(&img, &lm, &SynthConfig::default(), &mut rng::stream(0, &[])).is_err());
    }
}
