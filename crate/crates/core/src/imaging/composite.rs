use super::blur::{blur_plane, GaussianKernel};
use super::mask::Mask;
use crate::error::{Error, Result};
use crate::geometry::{ImageBuffer, CHANNELS};

/// Softens mask edges with a Gaussian of radius `radius_px` (kernel size
/// `2r + 1`, size-derived sigma). Radius 0 returns the mask unchanged.
///
/// Pixels farther than `radius_px` from any non-zero weight stay exactly 0.
pub fn feather(mask: &Mask, radius_px: usize) -> Mask {
    if radius_px == 0 {
        return mask.clone();
    }
    let kernel = GaussianKernel::with_size(2 * radius_px + 1).expect("odd kernel size");
    let values = blur_plane(mask.values(), mask.width(), mask.height(), 1, &kernel);
    Mask::new(mask.width(), mask.height(), values).expect("blur keeps mask values in range")
}

/// `mask · warped_face + (1 − mask) · original` after feathering the mask.
pub fn composite(
    original: &ImageBuffer,
    warped_face: &ImageBuffer,
    mask: &Mask,
    feather_px: usize,
) -> Result<ImageBuffer> {
    if warped_face.dims() != original.dims() {
        return Err(Error::DimensionMismatch { expected: original.dims(), actual: warped_face.dims() });
    }
    if mask.dims() != original.dims() {
        return Err(Error::DimensionMismatch { expected: original.dims(), actual: mask.dims() });
    }
    let m = feather(mask, feather_px);
    let data = original
        .data()
        .chunks_exact(CHANNELS)
        .zip(warped_face.data().chunks_exact(CHANNELS))
        .zip(m.values())
        .flat_map(|((o, w), &a)| {
            let mut px = [0.0f32; CHANNELS];
            for c in 0..CHANNELS {
                px[c] = if a == 0.0 {
                    o[c]
                } else if a == 1.0 {
                    w[c]
                } else {
                    (a * w[c] + (1.0 - a) * o[c]).clamp(0.0, 1.0)
                };
            }
            px
        })
        .collect();
    Ok(ImageBuffer::from_raw(original.width(), original.height(), data))
}
