use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clamp01, ImageBuffer, CHANNELS};

/// Photometric and mild geometric jitter. Identity is `(1, 1, 1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorJitterParams {
    /// Multiplies every channel.
    pub brightness: f64,
    /// Scales deviations from the mean luma.
    pub contrast: f64,
    /// 0 gives the smoothed image, 1 the input, above 1 an unsharp-boosted one.
    pub sharpness: f64,
    /// Amplitude in pixels of a sinusoidal horizontal row displacement whose
    /// period is the image height.
    pub distortion: f64,
}

impl Default for ColorJitterParams {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl ColorJitterParams {
    pub const IDENTITY: Self = Self { brightness: 1.0, contrast: 1.0, sharpness: 1.0, distortion: 0.0 };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("brightness", self.brightness),
            ("contrast", self.contrast),
            ("sharpness", self.sharpness),
            ("distortion", self.distortion),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Closed sampling intervals for each jitter field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterRanges {
    pub brightness: [f64; 2],
    pub contrast: [f64; 2],
    pub sharpness: [f64; 2],
    pub distortion: [f64; 2],
}

impl Default for JitterRanges {
    fn default() -> Self {
        Self { brightness: [0.8, 1.2], contrast: [0.8, 1.2], sharpness: [0.5, 1.5], distortion: [0.0, 2.0] }
    }
}

impl JitterRanges {
    /// No jitter at all.
    pub fn none() -> Self {
        Self { brightness: [1.0; 2], contrast: [1.0; 2], sharpness: [1.0; 2], distortion: [0.0; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        let id = ColorJitterParams::IDENTITY;
        let check = |name: &str, [lo, hi]: [f64; 2], identity: f64| {
            if !(lo >= 0.0) || !(lo <= hi) || !hi.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} range [{lo}, {hi}] is invalid")));
            }
            if !(lo..=hi).contains(&identity) {
                return Err(Error::InvalidConfig(format!(
                    "{name} range [{lo}, {hi}] must contain the identity value {identity}"
                )));
            }
            Ok(())
        };
        check("brightness", self.brightness, id.brightness)?;
        check("contrast", self.contrast, id.contrast)?;
        check("sharpness", self.sharpness, id.sharpness)?;
        check("distortion", self.distortion, id.distortion)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ColorJitterParams {
        let mut draw = |[lo, hi]: [f64; 2]| if lo == hi { lo } else { rng.random_range(lo..=hi) };
        ColorJitterParams {
            brightness: draw(self.brightness),
            contrast: draw(self.contrast),
            sharpness: draw(self.sharpness),
            distortion: draw(self.distortion),
        }
    }
}

/// Applies brightness, contrast, sharpness and distortion in that order and
/// clamps to `[0, 1]`. Identity-valued steps are skipped, so identity
/// parameters return the input unchanged.
pub fn apply_color_jitter(image: &ImageBuffer, p: &ColorJitterParams) -> Result<ImageBuffer> {
    p.validate()?;
    let (w, h) = image.dims();
    let mut img = image.clone();

    if p.brightness != 1.0 {
        let b = p.brightness as f32;
        img = map_values(&img, |v| v * b);
    }
    if p.contrast != 1.0 {
        let mean = img.mean_luma();
        img = map_values(&img, |v| ((v as f64 - mean) * p.contrast + mean) as f32);
    }
    if p.sharpness != 1.0 {
        let smooth = smooth3(&img);
        let f = p.sharpness;
        let data = smooth.iter().zip(img.data()).map(|(&s, &v)| (s + f * (v as f64 - s)) as f32).collect();
        img = clamped(w, h, data);
    }
    if p.distortion != 0.0 {
        let period = h as f64;
        let src = img;
        let mut data = Vec::with_capacity(w * h * CHANNELS);
        for y in 0..h {
            let shift = p.distortion * (2.0 * std::f64::consts::PI * y as f64 / period).sin();
            for x in 0..w {
                data.extend_from_slice(&src.sample_clamped(x as f64 - shift, y as f64));
            }
        }
        img = ImageBuffer::from_raw(w, h, data);
    }
    Ok(img)
}

fn map_values(img: &ImageBuffer, f: impl Fn(f32) -> f32) -> ImageBuffer {
    clamped(img.width(), img.height(), img.data().iter().map(|&v| f(v)).collect())
}

fn clamped(w: usize, h: usize, mut data: Vec<f32>) -> ImageBuffer {
    for v in data.iter_mut() {
        *v = clamp01(*v);
    }
    ImageBuffer::from_raw(w, h, data)
}

/// 3×3 smoothing filter with weights 1 around a center of 5 (sum 13),
/// clamp-to-edge.
fn smooth3(img: &ImageBuffer) -> Vec<f64> {
    let (w, h) = img.dims();
    let mut out = Vec::with_capacity(w * h * CHANNELS);
    for y in 0..h {
        for x in 0..w {
            for c in 0..CHANNELS {
                let mut acc = 4.0 * img.get(x, y, c) as f64;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let xx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                        let yy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                        acc += img.get(xx, yy, c) as f64;
                    }
                }
                out.push(acc / 13.0);
            }
        }
    }
    out
}
