use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ImageBuffer, LandmarkSet, CHANNELS};

pub const DEFAULT_ROI_SIZE: usize = 224;

/// Crop rectangle, `[x0, x1) × [y0, y1)` in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoiSpec {
    pub y0: usize,
    pub x0: usize,
    pub y1: usize,
    pub x1: usize,
}

impl RoiSpec {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn is_valid_for(&self, width: usize, height: usize) -> bool {
        self.x0 < self.x1 && self.x1 <= width && self.y0 < self.y1 && self.y1 <= height
    }
}

/// Tight bounding box of the inner-face landmarks (cheek outline excluded).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl FaceBox {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

pub fn face_box(landmarks: &LandmarkSet) -> Result<FaceBox> {
    let pts = &landmarks.points()[LandmarkSet::INNER_FACE];
    let b = pts.iter().fold(
        FaceBox { x_min: f64::INFINITY, y_min: f64::INFINITY, x_max: f64::NEG_INFINITY, y_max: f64::NEG_INFINITY },
        |b, p| FaceBox {
            x_min: b.x_min.min(p.x),
            y_min: b.y_min.min(p.y),
            x_max: b.x_max.max(p.x),
            y_max: b.y_max.max(p.y),
        },
    );
    if !(b.width() > 0.0 && b.height() > 0.0) {
        return Err(Error::EmptyBox);
    }
    Ok(b)
}

/// Expands the face box by `[top, left, bottom, right]` margins and clamps to
/// the image.
pub fn roi_with_margins(landmarks: &LandmarkSet, image_w: usize, image_h: usize, margins: [f64; 4]) -> Result<RoiSpec> {
    let b = face_box(landmarks)?;
    let [top, left, bottom, right] = margins;
    let clamp = |v: f64, hi: usize| v.max(0.0).min(hi as f64) as usize;
    let roi = RoiSpec {
        y0: clamp((b.y_min - top).floor(), image_h),
        x0: clamp((b.x_min - left).floor(), image_w),
        y1: clamp((b.y_max + bottom).ceil(), image_h),
        x1: clamp((b.x_max + right).ceil(), image_w),
    };
    if !roi.is_valid_for(image_w, image_h) {
        return Err(Error::EmptyBox);
    }
    Ok(roi)
}

/// Random RoI around the face: vertical margins drawn independently from
/// `U[0, h/5]` and horizontal ones from `U[0, w/8]`, where `h × w` is the
/// inner-face box.
pub fn sample_roi<R: Rng + ?Sized>(
    landmarks: &LandmarkSet,
    image_w: usize,
    image_h: usize,
    rng: &mut R,
) -> Result<RoiSpec> {
    let b = face_box(landmarks)?;
    let max_y = b.height() / 5.0;
    let max_x = b.width() / 8.0;
    let top = rng.random::<f64>() * max_y;
    let left = rng.random::<f64>() * max_x;
    let bottom = rng.random::<f64>() * max_y;
    let right = rng.random::<f64>() * max_x;
    roi_with_margins(landmarks, image_w, image_h, [top, left, bottom, right])
}

/// Bilinear resize of the RoI to `size × size`, sampling only inside the RoI.
/// Pixel centers are aligned, so a same-size RoI is copied exactly.
pub fn crop_resize(image: &ImageBuffer, roi: &RoiSpec, size: usize) -> Result<ImageBuffer> {
    if !roi.is_valid_for(image.width(), image.height()) {
        return Err(Error::InvalidImage(format!("RoI {roi:?} outside the {}x{} image", image.width(), image.height())));
    }
    let crop = image.crop(roi.x0, roi.y0, roi.width(), roi.height())?;
    if roi.width() == size && roi.height() == size {
        return Ok(crop);
    }
    let sx = roi.width() as f64 / size as f64;
    let sy = roi.height() as f64 / size as f64;
    let mut data = Vec::with_capacity(size * size * CHANNELS);
    for v in 0..size {
        let y = (v as f64 + 0.5) * sy - 0.5;
        for u in 0..size {
            let x = (u as f64 + 0.5) * sx - 0.5;
            data.extend_from_slice(&crop.sample_clamped(x, y));
        }
    }
    ImageBuffer::new(size, size, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, NUM_LANDMARKS};
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Landmarks whose inner-face box is exactly `[x0, x1] × [y0, y1]`.
    fn box_landmarks(y0: f64, x0: f64, y1: f64, x1: f64) -> LandmarkSet {
        let mut pts = [Point::new((x0 + x1) / 2.0, (y0 + y1) / 2.0); NUM_LANDMARKS];
        pts[20] = Point::new(x0, y0);
        pts[40] = Point::new(x1, y1);
        // jawline far outside must be ignored
        pts[0] = Point::new(x0 - 50.0, y1 + 50.0);
        LandmarkSet::new(pts).unwrap()
    }

    struct ZeroRng;

    impl RngCore for ZeroRng {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            dst.fill(0);
        }
    }

    #[test]
    fn zero_margins_give_the_face_box() {
        let lm = box_landmarks(10.0, 20.0, 110.0, 180.0);
        let roi = sample_roi(&lm, 400, 300, &mut ZeroRng).unwrap();
        assert_eq!(roi, RoiSpec { y0: 10, x0: 20, y1: 110, x1: 180 });
    }

    #[test]
    fn margin_moments() {
        let lm = box_landmarks(10.0, 20.0, 110.0, 180.0);
        let b = face_box(&lm).unwrap();
        assert_eq!((b.height(), b.width()), (100.0, 160.0));
        let (max_y, max_x) = (b.height() / 5.0, b.width() / 8.0);
        assert_eq!((max_y, max_x), (20.0, 20.0));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        // draw through the same routine with an image large enough that nothing clamps
        let mut sums = [0.0f64; 4];
        let mut maxes = [0.0f64; 4];
        let n = 10_000;
        for _ in 0..n {
            let before = rng.clone();
            let roi = sample_roi(&lm, 1000, 1000, &mut rng).unwrap();
            let mut replay = before;
            let m = [
                replay.random::<f64>() * max_y,
                replay.random::<f64>() * max_x,
                replay.random::<f64>() * max_y,
                replay.random::<f64>() * max_x,
            ];
            assert_eq!(roi, roi_with_margins(&lm, 1000, 1000, m).unwrap());
            for i in 0..4 {
                sums[i] += m[i];
                maxes[i] = maxes[i].max(m[i]);
            }
            assert!(roi.y0 <= 10 && roi.y1 >= 110 && roi.x0 <= 20 && roi.x1 >= 180);
            assert!(roi.y1 <= 130 && roi.x1 <= 200);
        }
        for i in 0..4 {
            let bound = if i % 2 == 0 { max_y } else { max_x };
            assert!(maxes[i] <= bound);
            let mean = sums[i] / n as f64;
            assert!((mean - bound / 2.0).abs() <= 0.05 * bound / 2.0, "side {i}: mean {mean}");
        }
    }

    #[test]
    fn clamps_near_the_edge() {
        let lm = box_landmarks(2.0, 1.0, 58.0, 78.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let roi = sample_roi(&lm, 80, 60, &mut rng).unwrap();
            assert!(roi.is_valid_for(80, 60));
            assert!(roi.x0 <= 1 && roi.y0 <= 2 && roi.x1 >= 78 && roi.y1 >= 58);
        }
    }

    #[test]
    fn degenerate_box_is_empty() {
        let lm = LandmarkSet::new([Point::new(5.0, 5.0); NUM_LANDMARKS]).unwrap();
        assert_eq!(sample_roi(&lm, 10, 10, &mut ZeroRng), Err(Error::EmptyBox));
        let outside = box_landmarks(200.0, 200.0, 300.0, 300.0);
        assert_eq!(sample_roi(&outside, 10, 10, &mut ZeroRng), Err(Error::EmptyBox));
    }

    #[test]
    fn same_size_crop_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = ImageBuffer::from_fn(250, 240, |_, _, _| (rng.next_u32() % 1000) as f32 / 999.0);
        let roi = RoiSpec { y0: 7, x0: 11, y1: 7 + 224, x1: 11 + 224 };
        assert_eq!(crop_resize(&img, &roi, 224).unwrap(), img.crop(11, 7, 224, 224).unwrap());
    }

    #[test]
    fn constant_stays_constant() {
        let img = ImageBuffer::filled(50, 40, 0.3);
        let out = crop_resize(&img, &RoiSpec { y0: 3, x0: 5, y1: 33, x1: 47 }, 224).unwrap();
        assert_eq!(out.dims(), (224, 224));
        assert!(out.data().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn ramp_downsample_is_analytic() {
        let w = 448;
        let img = ImageBuffer::from_fn(w, w, |x, _, _| x as f32 / (w - 1) as f32);
        let out = crop_resize(&img, &RoiSpec { y0: 0, x0: 0, y1: w, x1: w }, 224).unwrap();
        for u in 0..224 {
            let expected = (2.0 * u as f64 + 0.5) / (w - 1) as f64;
            for y in [0, 100, 223] {
                assert!((out.get(u, y, 0) as f64 - expected).abs() <= 1e-6);
            }
        }
    }
}
