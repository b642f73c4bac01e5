//! Anchor sampling under per-axis separation constraints.
//!
//! Each anchor is drawn major axis first, then minor axis, so no two anchors
//! share a coordinate. Candidate coordinates are drawn from a coarse
//! occupancy grid per axis: cells fully covered by an existing anchor's
//! exclusion band are never proposed, the remaining cells are proposed in
//! proportion to the spatial-context mass, and an exact check rejects the
//! few candidates that land in a partially covered cell.

use super::{CanvasSpec, InstanceError, SeparationSpec};
use crate::geometry::{Axis, Point2};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_MARGIN_FRAC: f64 = 0.05;

// Rejection attempts allowed per requested anchor.
const ATTEMPTS_PER_ANCHOR: usize = 1000;

/// Distribution over anchor positions.
///
/// Masses need only be relative. `conditional_mass` gives the mass of the
/// strip `[lo, hi]` along `axis` given the coordinate already drawn on the
/// other axis.
pub trait SpatialContext {
    fn marginal_mass(&self, axis: Axis, lo: f64, hi: f64) -> f64;
    fn conditional_mass(&self, axis: Axis, given: f64, lo: f64, hi: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UniformContext;

impl SpatialContext for UniformContext {
    fn marginal_mass(&self, _axis: Axis, lo: f64, hi: f64) -> f64 {
        (hi - lo).max(0.0)
    }

    fn conditional_mass(&self, _axis: Axis, _given: f64, lo: f64, hi: f64) -> f64 {
        (hi - lo).max(0.0)
    }
}

/// Piecewise-constant empirical density over the canvas, row-major,
/// `cols x rows` cells of equal size.
#[derive(Debug, Clone)]
pub struct WeightGrid {
    canvas: CanvasSpec,
    cols: usize,
    rows: usize,
    weights: Vec<f64>,
}

impl WeightGrid {
    pub fn new(canvas: CanvasSpec, cols: usize, rows: usize, weights: Vec<f64>) -> Result<Self, InstanceError> {
        if cols == 0 || rows == 0 || weights.len() != cols * rows {
            return Err(InstanceError::InvalidParameter(format!(
                "weight grid {cols}x{rows} does not match {} weights",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(InstanceError::InvalidParameter("weights must be finite and non-negative".into()));
        }
        Ok(Self {
            canvas,
            cols,
            rows,
            weights,
        })
    }

    fn count(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.cols,
            Axis::Y => self.rows,
        }
    }

    fn cell_size(&self, axis: Axis) -> f64 {
        self.canvas.dimension(axis) / self.count(axis) as f64
    }

    fn weight(&self, axis: Axis, along: usize, across: usize) -> f64 {
        match axis {
            Axis::X => self.weights[across * self.cols + along],
            Axis::Y => self.weights[along * self.cols + across],
        }
    }

    /// Mass of `[lo, hi]` along `axis`, restricted to the given cross-axis cells.
    fn mass(&self, axis: Axis, lo: f64, hi: f64, across: impl Iterator<Item = usize> + Clone) -> f64 {
        let size = self.cell_size(axis);
        let mut total = 0.0;
        for k in 0..self.count(axis) {
            let (c0, c1) = (k as f64 * size, (k + 1) as f64 * size);
            let len = hi.min(c1) - lo.max(c0);
            if len <= 0.0 {
                continue;
            }
            let w: f64 = across.clone().map(|a| self.weight(axis, k, a)).sum();
            total += w * len / size;
        }
        total
    }
}

impl SpatialContext for WeightGrid {
    fn marginal_mass(&self, axis: Axis, lo: f64, hi: f64) -> f64 {
        self.mass(axis, lo, hi, 0..self.count(axis.other()))
    }

    fn conditional_mass(&self, axis: Axis, given: f64, lo: f64, hi: f64) -> f64 {
        let other = axis.other();
        let n = self.count(other);
        let idx = ((given / self.cell_size(other)).floor().max(0.0) as usize).min(n - 1);
        self.mass(axis, lo, hi, idx..idx + 1)
    }
}

/// Occupied coordinates along one axis plus the coarse cell grid.
struct AxisSlots {
    sep: f64,
    taken: Vec<f64>,
    cells: Vec<(f64, f64)>,
    blocked: Vec<bool>,
}

impl AxisSlots {
    fn new(lo: f64, hi: f64, cell: f64, sep: f64) -> Self {
        let count = (((hi - lo) / cell).ceil() as usize).max(1);
        let cells = (0..count)
            .map(|k| (lo + k as f64 * cell, (lo + (k + 1) as f64 * cell).min(hi)))
            .collect();
        Self {
            sep,
            taken: Vec::new(),
            cells,
            blocked: vec![false; count],
        }
    }

    fn conflicts(&self, v: f64) -> bool {
        let pos = self.taken.partition_point(|&t| t < v);
        let near = |t: f64| (t - v).abs() <= self.sep;
        (pos < self.taken.len() && near(self.taken[pos])) || (pos > 0 && near(self.taken[pos - 1]))
    }

    fn occupy(&mut self, v: f64) {
        let pos = self.taken.partition_point(|&t| t < v);
        self.taken.insert(pos, v);
        let (b0, b1) = (v - self.sep, v + self.sep);
        for (cell, blocked) in self.cells.iter().zip(self.blocked.iter_mut()) {
            if b0 <= cell.0 && cell.1 <= b1 {
                *blocked = true;
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, mass: impl Fn(f64, f64) -> f64) -> Option<f64> {
        let weights: Vec<f64> = self
            .cells
            .iter()
            .zip(&self.blocked)
            .map(|(&(lo, hi), &blocked)| if blocked || hi <= lo { 0.0 } else { mass(lo, hi) })
            .collect();
        let dist = WeightedIndex::new(&weights).ok()?;
        let (lo, hi) = self.cells[dist.sample(rng)];
        Some(rng.gen_range(lo..hi))
    }
}

/// Largest number of strictly `sep`-separated coordinates in a closed
/// interval of length `len`.
fn axis_capacity(len: f64, sep: f64) -> f64 {
    if sep <= 0.0 {
        f64::INFINITY
    } else if len <= 0.0 {
        1.0
    } else {
        (len / sep).ceil()
    }
}

/// Samples `n` anchors uniformly inside the canvas peeled by `margin_frac`
/// per side, pairwise separated on both axes.
pub fn sample_anchors(
    canvas: CanvasSpec,
    n: usize,
    sep: SeparationSpec,
    margin_frac: f64,
    seed: u64,
) -> Result<Vec<Point2>, InstanceError> {
    sample_anchors_with(canvas, n, sep, margin_frac, seed, &UniformContext)
}

pub fn sample_anchors_with<C: SpatialContext + ?Sized>(
    canvas: CanvasSpec,
    n: usize,
    sep: SeparationSpec,
    margin_frac: f64,
    seed: u64,
    context: &C,
) -> Result<Vec<Point2>, InstanceError> {
    if !canvas.is_valid() {
        return Err(InstanceError::InvalidParameter(format!("invalid canvas {canvas:?}")));
    }
    if !(0.0..=0.4).contains(&margin_frac) {
        return Err(InstanceError::InvalidParameter(format!(
            "margin_frac {margin_frac} outside [0, 0.4]"
        )));
    }
    if !sep.is_valid_for(&canvas) {
        return Err(InstanceError::InvalidParameter(format!(
            "separation {sep:?} invalid for canvas {canvas:?}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let major = canvas.major_axis();
    let minor = major.other();
    let region = |axis: Axis| {
        let d = canvas.dimension(axis);
        (margin_frac * d, (1.0 - margin_frac) * d)
    };
    let cell = sep.sep_abs.floor().max(1.0);
    let mut slots: Vec<AxisSlots> = [major, minor]
        .iter()
        .map(|&axis| {
            let (lo, hi) = region(axis);
            AxisSlots::new(lo, hi, cell, sep.along(&canvas, axis))
        })
        .collect();

    for &axis in &[major, minor] {
        let (lo, hi) = region(axis);
        let cap = axis_capacity(hi - lo, sep.along(&canvas, axis));
        if (n as f64) > cap {
            return Err(InstanceError::Capacity {
                requested: n,
                placed: 0,
                reason: format!("at most {cap} separated slots along {axis:?}"),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let budget = ATTEMPTS_PER_ANCHOR * n;
    let exhausted = |placed: usize, why: &str| InstanceError::Capacity {
        requested: n,
        placed,
        reason: why.to_string(),
    };

    while points.len() < n {
        let major_value = loop {
            attempts += 1;
            if attempts > budget {
                return Err(exhausted(points.len(), "rejection budget exhausted"));
            }
            let v = slots[0]
                .draw(&mut rng, |lo, hi| context.marginal_mass(major, lo, hi))
                .ok_or_else(|| exhausted(points.len(), "no free major-axis cells"))?;
            if !slots[0].conflicts(v) {
                break v;
            }
        };
        let minor_value = loop {
            attempts += 1;
            if attempts > budget {
                return Err(exhausted(points.len(), "rejection budget exhausted"));
            }
            let v = slots[1]
                .draw(&mut rng, |lo, hi| context.conditional_mass(minor, major_value, lo, hi))
                .ok_or_else(|| exhausted(points.len(), "no free minor-axis cells"))?;
            if !slots[1].conflicts(v) {
                break v;
            }
        };
        slots[0].occupy(major_value);
        slots[1].occupy(minor_value);
        points.push(match major {
            Axis::X => Point2::new(major_value, minor_value),
            Axis::Y => Point2::new(minor_value, major_value),
        });
    }
    Ok(points)
}
