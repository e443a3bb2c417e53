use crate::error::{Error, Result};

pub const CHANNELS: usize = 3;

/// An RGB raster with channel values in `[0, 1]`, row-major and
/// channel-interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("empty dimensions {width}x{height}")));
        }
        if data.len() != width * height * CHANNELS {
            return Err(Error::InvalidImage(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height * CHANNELS,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidImage(format!("value {v} outside [0, 1]")));
        }
        Ok(Self { width, height, data })
    }

    /// Callers guarantee the length and range invariants.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), width * height * CHANNELS);
        debug_assert!(data.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { width, height, data }
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        assert!((0.0..=1.0).contains(&value));
        Self::from_raw(width, height, vec![value; width * height * CHANNELS])
    }

    /// Builds an image by evaluating `f(x, y, channel)`; results are clamped.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize, usize) -> f32) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                for c in 0..CHANNELS {
                    data.push(clamp01(f(x, y, c)));
                }
            }
        }
        Self::from_raw(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * CHANNELS + c]
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f32; CHANNELS] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Bilinear sample at `(x, y)` with the coordinates clamped to the
    /// pixel-center grid, so out-of-range samples take the nearest border value.
    pub fn sample_clamped(&self, x: f64, y: f64) -> [f32; CHANNELS] {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let mut out = [0.0; CHANNELS];
        for (c, o) in out.iter_mut().enumerate() {
            let p00 = self.get(x0, y0, c) as f64;
            let p01 = self.get(x1, y0, c) as f64;
            let p10 = self.get(x0, y1, c) as f64;
            let p11 = self.get(x1, y1, c) as f64;
            let top = (1.0 - fx) * p00 + fx * p01;
            let bottom = (1.0 - fx) * p10 + fx * p11;
            *o = clamp01(((1.0 - fy) * top + fy * bottom) as f32);
        }
        out
    }

    /// Copy of the sub-rectangle `[x0, x0 + w) × [y0, y0 + h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidImage(format!("crop {w}x{h}+{x0}+{y0} outside {}x{}", self.width, self.height)));
        }
        let mut data = Vec::with_capacity(w * h * CHANNELS);
        for y in y0..y0 + h {
            let start = (y * self.width + x0) * CHANNELS;
            data.extend_from_slice(&self.data[start..start + w * CHANNELS]);
        }
        Ok(Self::from_raw(w, h, data))
    }

    pub fn flip_horizontal(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y, c| self.get(self.width - 1 - x, y, c))
    }

    /// Mean Rec.601 luma.
    pub fn mean_luma(&self) -> f64 {
        let sum: f64 = self
            .data
            .chunks_exact(CHANNELS)
            .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
            .sum();
        sum / (self.width * self.height) as f64
    }
}

impl AsRef<ImageBuffer> for ImageBuffer {
    fn as_ref(&self) -> &ImageBuffer {
        self
    }
}

#[inline]
pub(crate) fn clamp01(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Peak signal-to-noise ratio in dB over the pixels selected by `include`
/// (peak value 1). Identical inputs give `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer, mut include: impl FnMut(usize, usize) -> bool) -> f64 {
    assert_eq!(a.dims(), b.dims());
    let mut sse = 0.0;
    let mut n = 0usize;
    for y in 0..a.height() {
        for x in 0..a.width() {
            if !include(x, y) {
                continue;
            }
            for c in 0..CHANNELS {
                let d = a.get(x, y, c) as f64 - b.get(x, y, c) as f64;
                sse += d * d;
            }
            n += CHANNELS;
        }
    }
    if n == 0 || sse == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (1.0 / (sse / n as f64)).log10()
}
