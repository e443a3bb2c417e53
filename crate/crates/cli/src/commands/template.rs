use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use warpfake::geometry::{ImageBuffer, Point};
use warpfake::imaging::{polygon_mask, ShapeMode};

use crate::config::RunConfig;
use crate::io::{write_atomic, write_json_pretty, write_png};

#[derive(Clone, Debug, Serialize)]
pub struct TemplateExport {
    pub target_size: usize,
    /// Landmarks in pixels of the `target_size` square.
    pub points: Vec<[f64; 2]>,
}

/// Returns the configured template and, when `out` is given, writes
/// `template.json`, a `template.txt` landmark sidecar and a `template.png`
/// preview showing both mask shapes and the landmarks.
pub fn inspect_template(cfg: &RunConfig, out: Option<&Path>) -> Result<TemplateExport> {
    let template = cfg.synth.template();
    let size = template.target_size();
    let placed = template.place(size as f64, Point::new(0.0, 0.0));
    let export = TemplateExport { target_size: size, points: placed.points().iter().map(|p| [p.x, p.y]).collect() };
    if let Some(out) = out {
        let whole = polygon_mask(size, size, &placed, ShapeMode::WholeFace)?;
        let inner = polygon_mask(size, size, &placed, ShapeMode::ConvexPolygon)?;
        let mut preview = ImageBuffer::from_fn(size, size, |x, y, c| {
            let base = 0.1 + 0.25 * whole.get(x, y) + 0.25 * inner.get(x, y);
            if c == 2 {
                base + 0.1
            } else {
                base
            }
        })
        .into_data();
        for p in placed.points() {
            let (x, y) = (p.x.round() as usize, p.y.round() as usize);
            if x < size && y < size {
                for c in 0..3 {
                    preview[(y * size + x) * 3 + c] = if c == 0 { 1.0 } else { 0.2 };
                }
            }
        }
        write_png(&out.join("template.png"), &ImageBuffer::new(size, size, preview)?)?;
        write_atomic(&out.join("template.txt"), placed.to_sidecar().as_bytes())?;
        write_json_pretty(&out.join("template.json"), &export)?;
    }
    Ok(export)
}
