use super::buffer::{ImageBuffer, CHANNELS};
use super::landmarks::Point;
use super::transform::{invert, SimilarityTransform};

/// Resamples `image` into an `out_w × out_h` frame: output pixel `(u, v)` is
/// the bilinear sample of the input at `t⁻¹(u, v)`, clamped to the border.
///
/// Panics if `t` is not invertible or an output dimension is zero.
pub fn warp(image: &ImageBuffer, t: &SimilarityTransform, out_w: usize, out_h: usize) -> ImageBuffer {
    assert!(out_w >= 1 && out_h >= 1, "output dimensions must be positive");
    let inv = invert(t).expect("warp needs an invertible transform");
    let mut data = Vec::with_capacity(out_w * out_h * CHANNELS);
    for v in 0..out_h {
        for u in 0..out_w {
            let src = inv.apply(Point::new(u as f64, v as f64));
            data.extend_from_slice(&image.sample_clamped(src.x, src.y));
        }
    }
    ImageBuffer::from_raw(out_w, out_h, data)
}

/// Single-channel variant of [`warp`] for masks: taps outside the source
/// contribute zero instead of the border value.
pub fn warp_zero_padded(
    values: &[f32],
    width: usize,
    height: usize,
    t: &SimilarityTransform,
    out_w: usize,
    out_h: usize,
) -> Vec<f32> {
    assert_eq!(values.len(), width * height);
    let inv = invert(t).expect("warp needs an invertible transform");
    let at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
            0.0
        } else {
            values[y as usize * width + x as usize] as f64
        }
    };
    let mut out = Vec::with_capacity(out_w * out_h);
    for v in 0..out_h {
        for u in 0..out_w {
            let src = inv.apply(Point::new(u as f64, v as f64));
            if src.x <= -1.0 || src.y <= -1.0 || src.x >= width as f64 || src.y >= height as f64 {
                out.push(0.0);
                continue;
            }
            let x0 = src.x.floor();
            let y0 = src.y.floor();
            let fx = src.x - x0;
            let fy = src.y - y0;
            let (x0, y0) = (x0 as i64, y0 as i64);
            let top = (1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0);
            let bottom = (1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1);
            out.push((((1.0 - fy) * top + fy * bottom) as f32).clamp(0.0, 1.0));
        }
    }
    out
}
