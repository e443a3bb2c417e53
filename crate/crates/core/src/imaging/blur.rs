use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ImageBuffer, CHANNELS};

/// Separable, normalized Gaussian kernel of odd size.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel {
    size: usize,
    sigma: f64,
    taps: Vec<f64>,
}

impl Default for GaussianKernel {
    /// 5×5 with σ = 1.1.
    fn default() -> Self {
        Self::with_size(5).expect("5 is a valid kernel size")
    }
}

impl GaussianKernel {
    pub fn new(size: usize, sigma: f64) -> Result<Self> {
        if size == 0 || size % 2 == 0 {
            return Err(Error::InvalidConfig(format!("kernel size must be odd, got {size}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("kernel sigma must be positive, got {sigma}")));
        }
        let r = (size / 2) as i64;
        let raw: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()).collect();
        let total: f64 = raw.iter().sum();
        let taps = raw.into_iter().map(|w| w / total).collect();
        Ok(Self { size, sigma, taps })
    }

    /// Size-derived sigma `0.3·((size − 1)/2 − 1) + 0.8`.
    pub fn with_size(size: usize) -> Result<Self> {
        Self::new(size, conventional_sigma(size))
    }

    /// The 1×1 kernel; blurring with it is a no-op.
    pub fn identity() -> Self {
        Self { size: 1, sigma: 1.0, taps: vec![1.0] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Dense `size × size` weights, row-major (outer product of the taps).
    pub fn weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.size * self.size);
        for a in &self.taps {
            for b in &self.taps {
                w.push(a * b);
            }
        }
        w
    }
}

fn conventional_sigma(size: usize) -> f64 {
    0.3 * ((size as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Separable Gaussian blur per channel, clamp-to-edge boundary.
pub fn gaussian_blur(image: &ImageBuffer, kernel: &GaussianKernel) -> ImageBuffer {
    if kernel.size == 1 {
        return image.clone();
    }
    let out = blur_plane(image.data(), image.width(), image.height(), CHANNELS, kernel);
    ImageBuffer::from_raw(image.width(), image.height(), out)
}

/// Blurs interleaved `channels`-plane data of size `width × height`.
///
/// Symmetric taps are summed in mirrored pairs, so blurring commutes
/// bit-exactly with a horizontal flip.
pub fn blur_plane(data: &[f32], width: usize, height: usize, channels: usize, kernel: &GaussianKernel) -> Vec<f32> {
    assert_eq!(data.len(), width * height * channels);
    let r = kernel.radius();
    let taps = &kernel.taps;
    let clamp = |i: i64, n: usize| i.clamp(0, n as i64 - 1) as usize;

    let mut horiz = vec![0.0f64; data.len()];
    for y in 0..height {
        let row = &data[y * width * channels..(y + 1) * width * channels];
        for x in 0..width {
            for c in 0..channels {
                let mut acc = taps[r] * row[x * channels + c] as f64;
                for k in 1..=r {
                    let left = row[clamp(x as i64 - k as i64, width) * channels + c] as f64;
                    let right = row[clamp(x as i64 + k as i64, width) * channels + c] as f64;
                    acc += taps[r + k] * (left + right);
                }
                horiz[(y * width + x) * channels + c] = acc;
            }
        }
    }

    let stride = width * channels;
    let mut out = vec![0.0f32; data.len()];
    for y in 0..height {
        for i in 0..stride {
            let mut acc = taps[r] * horiz[y * stride + i];
            for k in 1..=r {
                let up = horiz[clamp(y as i64 - k as i64, height) * stride + i];
                let down = horiz[clamp(y as i64 + k as i64, height) * stride + i];
                acc += taps[r + k] * (up + down);
            }
            out[y * stride + i] = (acc as f32).clamp(0.0, 1.0);
        }
    }
    out
}

/// Serializable form of a kernel (size and sigma).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub size: usize,
    pub sigma: f64,
}

impl From<&GaussianKernel> for KernelSpec {
    fn from(k: &GaussianKernel) -> Self {
        Self { size: k.size, sigma: k.sigma }
    }
}
