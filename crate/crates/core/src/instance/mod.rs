//! Problem instances: canvas, anchored items and separation constants.

mod io;
mod mask;
mod sampling;

pub use io::{parse_instance, read_instance, read_instance_unchecked, to_json, write_instance};
pub use mask::{snug_canvas_from_mask, BoolMask, SnugCanvas};
pub use sampling::{
    sample_anchors, sample_anchors_with, SpatialContext, UniformContext, WeightGrid,
    DEFAULT_MARGIN_FRAC,
};

use crate::geometry::{interiors_disjoint, penetration_depth, AxisBox, Axis, Point2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot place {requested} anchors ({placed} placed): {reason}")]
    Capacity {
        requested: usize,
        placed: usize,
        reason: String,
    },
    #[error("mask has no foreground cells")]
    EmptyMask,
    #[error("{source_name}: parse error at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("instance failed validation: {}", summarize(.0))]
    Validation(Vec<Violation>),
    #[error("anchors of items {0} and {1} coincide")]
    CoincidentAnchors(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    let shown: Vec<String> = violations.iter().take(3).map(|v| format!("{v:?}")).collect();
    if violations.len() > 3 {
        format!("{} (+{} more)", shown.join("; "), violations.len() - 3)
    } else {
        shown.join("; ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanvasSpec {
    pub width: f64,
    pub height: f64,
}

impl CanvasSpec {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn is_valid(&self) -> bool {
        self.width.is_finite() && self.height.is_finite() && self.width > 0.0 && self.height > 0.0
    }

    /// The longer side; `X` on ties.
    pub fn major_axis(&self) -> Axis {
        if self.height > self.width {
            Axis::Y
        } else {
            Axis::X
        }
    }

    pub fn dimension(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.width,
            Axis::Y => self.height,
        }
    }

    pub fn as_box(&self) -> AxisBox {
        AxisBox::canvas(self.width, self.height)
    }

    /// Strict interior membership.
    pub fn contains_strictly(&self, p: Point2) -> bool {
        p.x > 0.0 && p.x < self.width && p.y > 0.0 && p.y < self.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub id: usize,
    pub class_label: String,
    pub base_width: f64,
    pub base_height: f64,
    pub anchor: Point2,
}

impl ItemSpec {
    pub fn new(id: usize, class_label: impl Into<String>, base_width: f64, base_height: f64, anchor: Point2) -> Self {
        Self {
            id,
            class_label: class_label.into(),
            base_width,
            base_height,
            anchor,
        }
    }

    /// The item's box scaled by `scale` and centered on its anchor.
    pub fn scaled_box(&self, scale: f64) -> AxisBox {
        AxisBox::new(self.anchor, scale * self.base_width, scale * self.base_height)
    }

    pub fn base_area(&self) -> f64 {
        self.base_width * self.base_height
    }

    pub fn base_extent(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.base_width,
            Axis::Y => self.base_height,
        }
    }

    /// Largest scale at which the anchored box stays inside the canvas.
    pub fn boundary_fit(&self, canvas: &CanvasSpec) -> f64 {
        let p = self.anchor;
        [
            2.0 * p.x / self.base_width,
            2.0 * (canvas.width - p.x) / self.base_width,
            2.0 * p.y / self.base_height,
            2.0 * (canvas.height - p.y) / self.base_height,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// Minimum anchor separation: an absolute pixel distance and a fraction of
/// the canvas dimension. The effective separation on an axis is the larger.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SeparationSpec {
    pub sep_abs: f64,
    pub sep_pct: f64,
}

impl SeparationSpec {
    pub fn new(sep_abs: f64, sep_pct: f64) -> Self {
        Self { sep_abs, sep_pct }
    }

    pub fn along(&self, canvas: &CanvasSpec, axis: Axis) -> f64 {
        self.sep_abs.max(self.sep_pct * canvas.dimension(axis))
    }

    pub fn is_valid_for(&self, canvas: &CanvasSpec) -> bool {
        self.sep_abs.is_finite()
            && self.sep_abs >= 0.0
            && (0.0..1.0).contains(&self.sep_pct)
            && self.along(canvas, Axis::X) < canvas.width
            && self.along(canvas, Axis::Y) < canvas.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RarpInstance {
    pub canvas: CanvasSpec,
    pub separation: SeparationSpec,
    pub items: Vec<ItemSpec>,
}

impl RarpInstance {
    pub fn new(canvas: CanvasSpec, separation: SeparationSpec, items: Vec<ItemSpec>) -> Self {
        Self {
            canvas,
            separation,
            items,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// One broken input rule, naming the offending item indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum Violation {
    InvalidCanvas,
    InvalidSeparation,
    IdMismatch { index: usize, id: usize },
    NonFiniteValue { item: usize },
    NonPositiveSize { item: usize },
    AnchorOutsideCanvas { item: usize },
    CoincidentAnchors { i: usize, j: usize },
    InsufficientSeparation { i: usize, j: usize, axis: Axis, distance: f64, required: f64 },
}

/// Checks the input rules: positive canvas and item sizes, anchors strictly
/// inside the canvas, distinct anchors, and per-axis anchor separation.
///
/// Separation on an axis is `|d| > sep` when `sep > 0`. A zero effective
/// separation places no constraint on that axis; only coincident anchors are
/// rejected then.
pub fn validate_instance(instance: &RarpInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let canvas = &instance.canvas;
    if !canvas.is_valid() {
        out.push(Violation::InvalidCanvas);
        return out;
    }
    if !instance.separation.is_valid_for(canvas) {
        out.push(Violation::InvalidSeparation);
    }
    let sep_x = instance.separation.along(canvas, Axis::X);
    let sep_y = instance.separation.along(canvas, Axis::Y);

    for (index, item) in instance.items.iter().enumerate() {
        if item.id != index {
            out.push(Violation::IdMismatch { index, id: item.id });
        }
        if !(item.anchor.is_finite() && item.base_width.is_finite() && item.base_height.is_finite()) {
            out.push(Violation::NonFiniteValue { item: index });
            continue;
        }
        if item.base_width <= 0.0 || item.base_height <= 0.0 {
            out.push(Violation::NonPositiveSize { item: index });
        }
        if !canvas.contains_strictly(item.anchor) {
            out.push(Violation::AnchorOutsideCanvas { item: index });
        }
    }

    let items = &instance.items;
    for i in 0..items.len() {
        let a = items[i].anchor;
        if !a.is_finite() {
            continue;
        }
        for (j, other) in items.iter().enumerate().skip(i + 1) {
            let b = other.anchor;
            if !b.is_finite() {
                continue;
            }
            if a == b {
                out.push(Violation::CoincidentAnchors { i, j });
                continue;
            }
            for (axis, sep) in [(Axis::X, sep_x), (Axis::Y, sep_y)] {
                let d = (a.coord(axis) - b.coord(axis)).abs();
                if sep > 0.0 && d <= sep {
                    out.push(Violation::InsufficientSeparation {
                        i,
                        j,
                        axis,
                        distance: d,
                        required: sep,
                    });
                }
            }
        }
    }
    out
}

// Enough halvings to underflow any finite extent.
const MAX_CANONICAL_EXPONENT: u32 = 1100;

/// Smallest common exponent `k` such that every item shrunk by `2^-k` and
/// placed on its anchor is interior-disjoint from every other with a strictly
/// positive gap. The instance is not modified.
pub fn canonicalize(instance: &RarpInstance) -> Result<u32, InstanceError> {
    let items = &instance.items;
    let mut k = 0u32;
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            if items[i].anchor == items[j].anchor {
                return Err(InstanceError::CoincidentAnchors(i, j));
            }
            while k < MAX_CANONICAL_EXPONENT && !separated_with_slack(&items[i], &items[j], k) {
                k += 1;
            }
        }
    }
    Ok(k)
}

pub(crate) fn separated_with_slack(a: &ItemSpec, b: &ItemSpec, exponent: u32) -> bool {
    let s = 0.5f64.powi(exponent as i32);
    let (ba, bb) = (a.scaled_box(s), b.scaled_box(s));
    interiors_disjoint(&ba, &bb) && penetration_depth(&ba, &bb) < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: usize, w: f64, h: f64, x: f64, y: f64) -> ItemSpec {
        ItemSpec::new(id, "defect", w, h, Point2::new(x, y))
    }

    fn inst(items: Vec<ItemSpec>) -> RarpInstance {
        RarpInstance::new(CanvasSpec::new(10.0, 10.0), SeparationSpec::default(), items)
    }

    #[test]
    fn identical_anchors_give_one_violation() {
        let v = validate_instance(&inst(vec![item(0, 1.0, 1.0, 4.0, 4.0), item(1, 2.0, 2.0, 4.0, 4.0)]));
        assert_eq!(v, vec![Violation::CoincidentAnchors { i: 0, j: 1 }]);
    }

    #[test]
    fn anchor_outside_canvas() {
        let v = validate_instance(&inst(vec![item(0, 1.0, 1.0, -1.0, 5.0)]));
        assert_eq!(v, vec![Violation::AnchorOutsideCanvas { item: 0 }]);
    }

    #[test]
    fn separation_is_checked_per_axis() {
        let mut instance = inst(vec![item(0, 1.0, 1.0, 2.0, 2.0), item(1, 1.0, 1.0, 8.0, 2.5)]);
        instance.separation = SeparationSpec::new(1.0, 0.0);
        let v = validate_instance(&instance);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::InsufficientSeparation { axis: Axis::Y, .. }));
    }

    #[test]
    fn zero_separation_allows_shared_coordinate() {
        let v = validate_instance(&inst(vec![item(0, 2.0, 2.0, 2.0, 2.0), item(1, 2.0, 2.0, 6.0, 2.0)]));
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn bad_sizes_and_ids() {
        let v = validate_instance(&inst(vec![item(3, 0.0, 1.0, 2.0, 2.0)]));
        assert!(v.contains(&Violation::IdMismatch { index: 0, id: 3 }));
        assert!(v.contains(&Violation::NonPositiveSize { item: 0 }));
    }

    #[test]
    fn separation_larger_than_canvas_is_invalid() {
        let mut instance = inst(vec![]);
        instance.separation = SeparationSpec::new(12.0, 0.0);
        assert_eq!(validate_instance(&instance), vec![Violation::InvalidSeparation]);
    }

    #[test]
    fn canonical_exponent_halves_until_slack() {
        let instance = inst(vec![item(0, 1.0, 1.0, 2.0, 2.0), item(1, 1.0, 1.0, 2.5, 2.0)]);
        assert_eq!(canonicalize(&instance).unwrap(), 2);
        let apart = inst(vec![item(0, 1.0, 1.0, 2.0, 2.0), item(1, 1.0, 1.0, 6.0, 6.0)]);
        assert_eq!(canonicalize(&apart).unwrap(), 0);
    }

    #[test]
    fn canonical_exponent_is_max_over_pairs() {
        let instance = inst(vec![
            item(0, 2.0, 2.0, 5.0, 5.0),
            item(1, 1.0, 3.0, 5.7, 5.2),
            item(2, 4.0, 1.0, 4.0, 6.1),
        ]);
        // brute force: exponent required by each pair alone
        let pair_k = |a: &ItemSpec, b: &ItemSpec| {
            (0..64u32)
                .find(|&k| {
                    let s = 0.5f64.powi(k as i32);
                    let gx = (a.anchor.x - b.anchor.x).abs() - 0.5 * s * (a.base_width + b.base_width);
                    let gy = (a.anchor.y - b.anchor.y).abs() - 0.5 * s * (a.base_height + b.base_height);
                    gx > 0.0 || gy > 0.0
                })
                .unwrap()
        };
        let it = &instance.items;
        let expected = pair_k(&it[0], &it[1]).max(pair_k(&it[0], &it[2])).max(pair_k(&it[1], &it[2]));
        assert_eq!(canonicalize(&instance).unwrap(), expected);
        assert!(expected > 0);
    }

    #[test]
    fn canonicalize_rejects_coincident() {
        let instance = inst(vec![item(0, 1.0, 1.0, 2.0, 2.0), item(1, 1.0, 1.0, 2.0, 2.0)]);
        assert!(matches!(canonicalize(&instance), Err(InstanceError::CoincidentAnchors(0, 1))));
    }

    #[test]
    fn major_axis_prefers_longer_side() {
        assert_eq!(CanvasSpec::new(10.0, 20.0).major_axis(), Axis::Y);
        assert_eq!(CanvasSpec::new(20.0, 10.0).major_axis(), Axis::X);
        assert_eq!(CanvasSpec::new(10.0, 10.0).major_axis(), Axis::X);
    }
}
