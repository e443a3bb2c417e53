use super::landmarks::{LandmarkSet, Point};
use super::template::FaceTemplate;
use crate::error::{Error, Result};

/// A similarity transform `[[a, -b, tx], [b, a, ty]]`: uniform scale
/// `s = √(a² + b²)`, rotation `θ = atan2(b, a)`, then translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityTransform {
    pub a: f64,
    pub b: f64,
    pub tx: f64,
    pub ty: f64,
}

impl SimilarityTransform {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0, tx: 0.0, ty: 0.0 };

    pub fn from_params(scale: f64, theta: f64, tx: f64, ty: f64) -> Self {
        Self { a: scale * theta.cos(), b: scale * theta.sin(), tx, ty }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self { tx, ty, ..Self::IDENTITY }
    }

    pub fn scale(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn angle(&self) -> f64 {
        self.b.atan2(self.a)
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        Point::new(self.a * p.x - self.b * p.y + self.tx, self.b * p.x + self.a * p.y + self.ty)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let p = self.apply(Point::new(other.tx, other.ty));
        Self { a: self.a * other.a - self.b * other.b, b: self.b * other.a + self.a * other.b, tx: p.x, ty: p.y }
    }

    pub fn matrix(&self) -> [[f64; 3]; 2] {
        [[self.a, -self.b, self.tx], [self.b, self.a, self.ty]]
    }

    /// Least-squares similarity (no reflection) mapping `src[i]` onto `dst[i]`.
    ///
    /// With both point sets centered, the optimum is
    /// `a = Σ p·q / Σ|p|²`, `b = Σ p×q / Σ|p|²`; the translation then maps the
    /// source centroid onto the destination centroid. This is the 2-D
    /// Umeyama solution with the determinant constrained positive.
    pub fn fit(src: &[Point], dst: &[Point]) -> Result<Self> {
        assert_eq!(src.len(), dst.len(), "point sets must correspond");
        if src.is_empty() {
            return Err(Error::DegenerateConfiguration("no points"));
        }
        let n = src.len() as f64;
        let mean = |pts: &[Point]| {
            let (sx, sy) = pts.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
            Point::new(sx / n, sy / n)
        };
        let ms = mean(src);
        let md = mean(dst);
        let (mut var, mut dot, mut cross) = (0.0, 0.0, 0.0);
        for (p, q) in src.iter().zip(dst) {
            let (px, py) = (p.x - ms.x, p.y - ms.y);
            let (qx, qy) = (q.x - md.x, q.y - md.y);
            var += px * px + py * py;
            dot += px * qx + py * qy;
            cross += px * qy - py * qx;
        }
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::DegenerateConfiguration("landmark points are coincident"));
        }
        let a = dot / var;
        let b = cross / var;
        if a == 0.0 && b == 0.0 {
            return Err(Error::DegenerateConfiguration("target points are coincident"));
        }
        let tx = md.x - (a * ms.x - b * ms.y);
        let ty = md.y - (b * ms.x + a * ms.y);
        Ok(Self { a, b, tx, ty })
    }

    /// Sum of squared distances between `self(src[i])` and `dst[i]`.
    pub fn residual(&self, src: &[Point], dst: &[Point]) -> f64 {
        src.iter()
            .zip(dst)
            .map(|(p, q)| {
                let m = self.apply(*p);
                (m.x - q.x).powi(2) + (m.y - q.y).powi(2)
            })
            .sum()
    }
}

/// The transform taking image coordinates to an aligned face square of side
/// `scale · template.target_size()`, fitted over all 68 points.
pub fn estimate_alignment(landmarks: &LandmarkSet, template: &FaceTemplate, scale: f64) -> Result<SimilarityTransform> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidConfig(format!("alignment scale must be positive, got {scale}")));
    }
    SimilarityTransform::fit(landmarks.points(), &template.scaled_points(scale))
}

pub fn invert(t: &SimilarityTransform) -> Result<SimilarityTransform> {
    let det = t.a * t.a + t.b * t.b;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::NonInvertible(t.scale()));
    }
    let a = t.a / det;
    let b = -t.b / det;
    Ok(SimilarityTransform { a, b, tx: -(a * t.tx - b * t.ty), ty: -(b * t.tx + a * t.ty) })
}
