use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, Point};

/// Per-pixel blend weight: 1 takes the warped face, 0 keeps the original.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl Mask {
    pub fn new(width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::InvalidImage(format!("mask of {} values does not fit {width}x{height}", values.len())));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidImage("mask values must lie in [0, 1]".into()));
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("valid constant mask")
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

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.width + x]
    }

    /// Number of pixels with a non-zero weight.
    pub fn support(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeMode {
    /// The whole aligned face square is replaced.
    WholeFace,
    /// Only the convex hull of the eyebrows and the lower lip is replaced.
    ConvexPolygon,
}

/// Mask for a `width × height` face frame.
///
/// `WholeFace` covers the frame. `ConvexPolygon` fills the convex hull of the
/// eyebrow points (17–26) and the outer lower lip (54–59).
pub fn polygon_mask(width: usize, height: usize, landmarks: &LandmarkSet, mode: ShapeMode) -> Result<Mask> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!("empty mask dimensions {width}x{height}")));
    }
    match mode {
        ShapeMode::WholeFace => Ok(Mask::filled(width, height, 1.0)),
        ShapeMode::ConvexPolygon => {
            let pts = landmarks.points();
            let candidates: Vec<Point> =
                pts[LandmarkSet::EYEBROWS].iter().chain(&pts[LandmarkSet::MOUTH_BOTTOM]).copied().collect();
            let hull = convex_hull(&candidates)?;
            Ok(fill_convex_polygon(width, height, &hull))
        }
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain. Collinear points are dropped; fails with
/// `DegeneratePolygon` when fewer than three hull vertices remain.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    Ok(hull)
}

/// Scanline fill of a convex polygon, sampling pixel `(x, y)` at its center
/// coordinate `(x, y)`.
///
/// An edge is active on rows `y_min ≤ y < y_max`, and each row fills
/// `x_left ≤ x < x_right`. This half-open rule means polygons sharing an edge
/// never both cover a pixel.
pub fn fill_convex_polygon(width: usize, height: usize, polygon: &[Point]) -> Mask {
    let mut values = vec![0.0f32; width * height];
    let n = polygon.len();
    for y in 0..height {
        let yf = y as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let (mut p, mut q) = (polygon[i], polygon[(i + 1) % n]);
            if p.y == q.y {
                continue;
            }
            // canonical orientation so shared edges intersect identically
            if (q.y, q.x) < (p.y, p.x) {
                std::mem::swap(&mut p, &mut q);
            }
            if yf < p.y || yf >= q.y {
                continue;
            }
            let x = p.x + (yf - p.y) * (q.x - p.x) / (q.y - p.y);
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if !(lo < hi) {
            continue;
        }
        let start = lo.ceil().max(0.0);
        let end = hi.ceil().min(width as f64);
        if start >= end {
            continue;
        }
        for x in start as usize..end as usize {
            values[y * width + x] = 1.0;
        }
    }
    Mask { width, height, values }
}
