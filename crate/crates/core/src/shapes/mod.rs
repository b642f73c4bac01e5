//! Blob shapes and class-indexed mask rendering.
//!
//! A blob is a closed piecewise-cubic Bézier curve through angularly ordered
//! control points, sampled into a polygon. Packed boxes are rendered by
//! mapping each item's blob onto its rectangle and scan-converting it with
//! the even-odd rule at pixel centers.

mod ppm;

pub use ppm::{mask_to_ppm, read_ppm, write_mask, Palette, PpmFormat, RgbImage};

use crate::geometry::Point2;
use crate::instance::CanvasSpec;
use crate::solver::PackedBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

pub const MIN_BOUNDARY_VERTICES: usize = 16;
const RADIUS: f64 = 0.5;
const MAX_RADIAL_JITTER: f64 = 0.6;
const MAX_ANGULAR_JITTER: f64 = 0.8;

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("class index {index} is not in the palette ({size} entries)")]
    Palette { index: u32, size: usize },
    #[error("{0}")]
    PaletteFile(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("malformed PPM: {0}")]
    Ppm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobShape {
    pub control_points: Vec<Point2>,
    /// Closed polygon; the last vertex connects back to the first.
    pub boundary: Vec<Point2>,
}

impl BlobShape {
    /// Independent per-axis stretch of the whole shape.
    pub fn scaled(&self, sx: f64, sy: f64) -> BlobShape {
        let f = |p: &Point2| Point2::new(p.x * sx, p.y * sy);
        BlobShape {
            control_points: self.control_points.iter().map(f).collect(),
            boundary: self.boundary.iter().map(f).collect(),
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        self.boundary.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        )
    }
}

fn cubic(p0: Point2, p1: Point2, p2: Point2, p3: Point2, t: f64) -> Point2 {
    let u = 1.0 - t;
    let (a, b, c, d) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    Point2::new(
        a * p0.x + b * p1.x + c * p2.x + d * p3.x,
        a * p0.y + b * p1.y + c * p2.y + d * p3.y,
    )
}

/// Generates a closed blob.
///
/// Control points sit at jittered angles around the center with radii
/// `R * (1 - irregularity * u * 0.6)`. Each segment is a cubic whose end
/// tangents are parallel to the chord through the neighboring control
/// points, with the handle length that makes zero-jitter blobs approximate a
/// circle. The sampled polygon is re-ordered by angle about the center,
/// which keeps it simple even when the smoothed curve would fold, and is
/// then normalized so its bounding box fits the unit square.
pub fn gen_bezier_blob(seed: u64, n_control: usize, irregularity: f64) -> Result<BlobShape, ShapeError> {
    if n_control < 4 {
        return Err(ShapeError::InvalidParameter(format!("n_control {n_control} < 4")));
    }
    if !(0.0..=1.0).contains(&irregularity) {
        return Err(ShapeError::InvalidParameter(format!("irregularity {irregularity} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_control;
    let step = TAU / n as f64;
    let center = Point2::new(0.5, 0.5);
    let mut control: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let theta = step * (i as f64 + irregularity * MAX_ANGULAR_JITTER * rng.gen::<f64>());
        let r = RADIUS * (1.0 - irregularity * MAX_RADIAL_JITTER * rng.gen::<f64>());
        control.push((theta, r));
    }
    let points: Vec<Point2> = control
        .iter()
        .map(|&(t, r)| Point2::new(center.x + r * t.cos(), center.y + r * t.sin()))
        .collect();

    let handle_k = 4.0 / 3.0 * (step / 4.0).tan();
    let tangent = |i: usize| {
        let prev = points[(i + n - 1) % n];
        let next = points[(i + 1) % n];
        let (dx, dy) = (next.x - prev.x, next.y - prev.y);
        let len = dx.hypot(dy);
        let h = handle_k * control[i].1;
        Point2::new(dx / len * h, dy / len * h)
    };
    let per_segment = MIN_BOUNDARY_VERTICES.div_ceil(n).max(4);
    let mut samples = Vec::with_capacity(n * per_segment);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p0, p3) = (points[i], points[j]);
        let (ti, tj) = (tangent(i), tangent(j));
        let p1 = Point2::new(p0.x + ti.x, p0.y + ti.y);
        let p2 = Point2::new(p3.x - tj.x, p3.y - tj.y);
        for k in 0..per_segment {
            samples.push(cubic(p0, p1, p2, p3, k as f64 / per_segment as f64));
        }
    }

    let angle = |p: &Point2| (p.y - center.y).atan2(p.x - center.x);
    let mut keyed: Vec<(f64, Point2)> = samples.into_iter().map(|p| (angle(&p), p)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    let boundary: Vec<Point2> = keyed.into_iter().map(|(_, p)| p).collect();

    let raw = BlobShape {
        control_points: points,
        boundary,
    };
    let (x0, y0, x1, y1) = raw.bounds();
    let s = 1.0 / (x1 - x0).max(y1 - y0);
    let (ox, oy) = ((1.0 - (x1 - x0) * s) / 2.0, (1.0 - (y1 - y0) * s) / 2.0);
    let norm = |p: &Point2| Point2::new(((p.x - x0) * s + ox).clamp(0.0, 1.0), ((p.y - y0) * s + oy).clamp(0.0, 1.0));
    Ok(BlobShape {
        control_points: raw.control_points.iter().map(norm).collect(),
        boundary: raw.boundary.iter().map(norm).collect(),
    })
}

/// Tight bounding-box extent of the boundary.
pub fn shape_bbox(shape: &BlobShape) -> (f64, f64) {
    let (x0, y0, x1, y1) = shape.bounds();
    (x1 - x0, y1 - y0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskImage {
    pub width: usize,
    pub height: usize,
    /// Row-major class indices; 0 is background.
    pub cells: Vec<u32>,
}

impl MaskImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![0; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, class: u32) {
        self.cells[y * self.width + x] = class;
    }
}

/// Palette index of each item's class label; unknown labels map to 1.
pub fn class_indices(items: &[crate::instance::ItemSpec], palette: &Palette) -> Vec<u32> {
    items.iter().map(|it| palette.index_of(&it.class_label).unwrap_or(1)).collect()
}

/// Pixel grid dimensions for a canvas.
pub fn mask_dimensions(canvas: &CanvasSpec) -> (usize, usize) {
    (canvas.width.ceil() as usize, canvas.height.ceil() as usize)
}

/// Renders packed boxes into a class mask. Each shape's bounding box is
/// mapped affinely onto its packed rectangle; a pixel belongs to an item
/// when its center is inside the mapped polygon (even-odd, half-open).
pub fn rasterize(
    canvas: &CanvasSpec,
    packed: &[PackedBox],
    shapes: &[BlobShape],
    class_ids: &[u32],
) -> Result<MaskImage, ShapeError> {
    if packed.len() != shapes.len() || packed.len() != class_ids.len() {
        return Err(ShapeError::LengthMismatch(format!(
            "{} boxes, {} shapes, {} class ids",
            packed.len(),
            shapes.len(),
            class_ids.len()
        )));
    }
    let (w, h) = mask_dimensions(canvas);
    let mut mask = MaskImage::new(w, h);
    let mut crossings = Vec::new();
    for ((pb, shape), &class) in packed.iter().zip(shapes).zip(class_ids) {
        let rect = pb.rect;
        let (sx0, sy0, sx1, sy1) = shape.bounds();
        let (sw, sh) = (sx1 - sx0, sy1 - sy0);
        if !(sw > 0.0 && sh > 0.0 && rect.width > 0.0 && rect.height > 0.0) {
            continue;
        }
        let to_x = |u: f64| rect.min_x() + (u - sx0) / sw * rect.width;
        let row_lo = (rect.min_y() - 0.5).ceil().max(0.0) as usize;
        let row_hi = ((rect.max_y() - 0.5).ceil().max(0.0) as usize).min(h);
        for row in row_lo..row_hi {
            let cy = row as f64 + 0.5;
            let v = sy0 + (cy - rect.min_y()) / rect.height * sh;
            crossings.clear();
            let m = shape.boundary.len();
            for k in 0..m {
                let a = shape.boundary[k];
                let b = shape.boundary[(k + 1) % m];
                if (a.y <= v) != (b.y <= v) {
                    let t = (v - a.y) / (b.y - a.y);
                    crossings.push(to_x(a.x + t * (b.x - a.x)));
                }
            }
            crossings.sort_by(f64::total_cmp);
            for pair in crossings.chunks_exact(2) {
                let c_lo = (pair[0] - 0.5).ceil().max(0.0) as usize;
                let c_hi = ((pair[1] - 0.5).ceil().max(0.0) as usize).min(w);
                for col in c_lo..c_hi {
                    mask.set(col, row, class);
                }
            }
        }
    }
    Ok(mask)
}
