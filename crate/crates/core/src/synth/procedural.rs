//! Procedurally rendered faces with exact landmarks, for demos and tests
//! where no real face data is at hand.
//!
//! Each face is a textured ellipse on a textured background, with dark
//! features drawn at the eye, brow, nose and mouth landmarks. Texture is
//! per-pixel noise, so pristine faces carry fine detail everywhere.

use rand::Rng;

use super::batch::FaceImage;
use crate::geometry::{FaceTemplate, ImageBuffer, LandmarkSet, Point, SimilarityTransform};
use crate::rng;

struct Identity {
    skin: [f32; 3],
    background: [f32; 3],
    texture: f32,
    side: f64,
    center: Point,
    angle: f64,
}

fn noise(seed: u64, x: usize, y: usize, c: usize) -> f32 {
    let mut z = seed ^ ((x as u64) << 40) ^ ((y as u64) << 20) ^ (c as u64);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 40) as f32 / (1u64 << 24) as f32 - 0.5
}

fn render(size: usize, id: &Identity, landmarks: &LandmarkSet, texture_seed: u64) -> ImageBuffer {
    let pts = landmarks.points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts.iter() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0 - 0.1 * (y1 - y0));
    let (rx, ry) = (0.55 * (x1 - x0), 0.65 * (y1 - y0));
    let features: Vec<Point> = pts[17..68].to_vec();
    let dot = (id.side / 40.0).max(0.8);
    ImageBuffer::from_fn(size, size, |x, y, c| {
        let (fx, fy) = (x as f64, y as f64);
        let inside = ((fx - cx) / rx).powi(2) + ((fy - cy) / ry).powi(2) <= 1.0;
        let base = if inside { id.skin[c] } else { id.background[c] };
        let mut v = base + id.texture * noise(texture_seed, x, y, c);
        if inside && features.iter().any(|p| (p.x - fx).powi(2) + (p.y - fy).powi(2) <= dot * dot) {
            v *= 0.35;
        }
        v
    })
}

/// Renders `n_frames` frames of one synthetic subject. The subject's look is
/// fixed by `seed`; pose and texture vary slightly from frame to frame.
pub fn procedural_video(size: usize, n_frames: usize, seed: u64, video_id: &str) -> Vec<FaceImage> {
    assert!(size >= 32, "procedural faces need at least 32 pixels");
    let mut r = rng::stream(seed, &[0]);
    let mut color = |lo: f32, hi: f32| [r.random_range(lo..hi), r.random_range(lo..hi), r.random_range(lo..hi)];
    let skin = color(0.45, 0.85);
    let background = color(0.1, 0.6);
    let texture = r.random_range(0.15..0.3);
    let s = size as f64;
    let side = r.random_range(0.45 * s..0.6 * s);
    let slack = (s - side * 1.2) / 2.0;
    let center =
        Point::new(s / 2.0 + r.random_range(-slack..slack) * 0.5, s / 2.0 + r.random_range(-slack..slack) * 0.5);
    let angle = r.random_range(-0.15..0.15);
    let id = Identity { skin, background, texture, side, center, angle };

    let template = FaceTemplate::default();
    (0..n_frames)
        .map(|f| {
            let mut fr = rng::stream(seed, &[1, f as u64]);
            let side = id.side * fr.random_range(0.97..1.03);
            let center = Point::new(id.center.x + fr.random_range(-1.5..1.5), id.center.y + fr.random_range(-1.5..1.5));
            let angle = id.angle + fr.random_range(-0.03..0.03);
            let placed = template.place(side, Point::new(-side / 2.0, -side / 2.0));
            let pose = SimilarityTransform::from_params(1.0, angle, center.x, center.y);
            let landmarks = placed.map(|p| pose.apply(p)).expect("finite pose");
            let image = render(size, &id, &landmarks, fr.random());
            FaceImage {
                image,
                landmarks,
                source_id: format!("{video_id}/{f:04}"),
                video_id: Some(video_id.to_string()),
            }
        })
        .collect()
}

/// A single procedural face.
pub fn procedural_face(size: usize, seed: u64) -> FaceImage {
    let mut faces = procedural_video(size, 1, seed, &format!("face{seed}"));
    let mut face = faces.pop().expect("one frame");
    face.video_id = None;
    face
}
