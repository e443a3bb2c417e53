use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_LANDMARKS: usize = 68;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// 68 facial landmarks in image pixel coordinates, iBUG-68 ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet {
    points: [Point; NUM_LANDMARKS],
}

impl LandmarkSet {
    pub const JAWLINE: Range<usize> = 0..17;
    pub const EYEBROWS: Range<usize> = 17..27;
    pub const LEFT_EYE: Range<usize> = 36..42;
    pub const RIGHT_EYE: Range<usize> = 42..48;
    pub const MOUTH: Range<usize> = 48..68;
    /// Outer lower lip, used as the bottom edge of the convex face polygon.
    pub const MOUTH_BOTTOM: Range<usize> = 54..60;
    /// Everything except the cheek outline.
    pub const INNER_FACE: Range<usize> = 17..68;

    pub fn new(points: [Point; NUM_LANDMARKS]) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidLandmarks(format!("point {i} is not finite")));
        }
        Ok(Self { points })
    }

    pub fn from_slice(points: &[Point]) -> Result<Self> {
        let points: [Point; NUM_LANDMARKS] = points
            .try_into()
            .map_err(|_| Error::InvalidLandmarks(format!("expected {NUM_LANDMARKS} points, got {}", points.len())))?;
        Self::new(points)
    }

    pub fn points(&self) -> &[Point; NUM_LANDMARKS] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Point {
        self.points[i]
    }

    /// Checks that at least one landmark falls inside a `width × height` image.
    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        let inside = self
            .points
            .iter()
            .any(|p| p.x >= 0.0 && p.y >= 0.0 && p.x <= (width as f64 - 1.0) && p.y <= (height as f64 - 1.0));
        if inside {
            Ok(())
        } else {
            Err(Error::InvalidLandmarks(format!("no landmark inside the {width}x{height} image")))
        }
    }

    pub fn map(&self, mut f: impl FnMut(Point) -> Point) -> Result<Self> {
        let mut points = self.points;
        for p in points.iter_mut() {
            *p = f(*p);
        }
        Self::new(points)
    }

    /// Parses a sidecar file: 68 lines of `x y`. Blank lines are ignored.
    pub fn parse_sidecar(text: &str) -> Result<Self> {
        let mut points = Vec::with_capacity(NUM_LANDMARKS);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::InvalidLandmarks(format!("line {}: expected `x y`", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidLandmarks(format!("line {}: {e}", lineno + 1)))
            };
            let x = parse(fields.next())?;
            let y = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(Error::InvalidLandmarks(format!("line {}: trailing fields", lineno + 1)));
            }
            points.push(Point::new(x, y));
        }
        Self::from_slice(&points)
    }

    pub fn to_sidecar(&self) -> String {
        let mut out = String::with_capacity(NUM_LANDMARKS * 24);
        for p in &self.points {
            let _ = writeln!(out, "{} {}", p.x, p.y);
        }
        out
    }
}
