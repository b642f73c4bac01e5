//! Axis-aligned box primitives and the overlap classifier.
//!
//! Boxes are stored as center + extent because every packed box is anchored
//! at its center. Corner coordinates are derived on demand. All interior
//! tests use strict comparisons, so boxes that share an edge are disjoint.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn coord(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// A closed interval `[lo, hi]` on one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Signed length of the common part; positive iff the open intervals meet.
    pub fn overlap(&self, other: &Interval) -> f64 {
        self.hi.min(other.hi) - self.lo.max(other.lo)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Axis-aligned rectangle given by its center and full extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub center: Point2,
    pub width: f64,
    pub height: f64,
}

impl AxisBox {
    pub fn new(center: Point2, width: f64, height: f64) -> Self {
        debug_assert!(width >= 0.0 && height >= 0.0, "negative box extent");
        Self {
            center,
            width,
            height,
        }
    }

    pub fn from_corners(min: Point2, max: Point2) -> Self {
        Self::new(
            Point2::new(0.5 * (min.x + max.x), 0.5 * (min.y + max.y)),
            max.x - min.x,
            max.y - min.y,
        )
    }

    /// The canvas rectangle `[0, width] x [0, height]`.
    pub fn canvas(width: f64, height: f64) -> Self {
        Self::from_corners(Point2::new(0.0, 0.0), Point2::new(width, height))
    }

    pub fn min_x(&self) -> f64 {
        self.center.x - 0.5 * self.width
    }

    pub fn max_x(&self) -> f64 {
        self.center.x + 0.5 * self.width
    }

    pub fn min_y(&self) -> f64 {
        self.center.y - 0.5 * self.height
    }

    pub fn max_y(&self) -> f64 {
        self.center.y + 0.5 * self.height
    }

    pub fn min(&self) -> Point2 {
        Point2::new(self.min_x(), self.min_y())
    }

    pub fn max(&self) -> Point2 {
        Point2::new(self.max_x(), self.max_y())
    }

    pub fn extent(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.width,
            Axis::Y => self.height,
        }
    }

    pub fn interval(&self, axis: Axis) -> Interval {
        match axis {
            Axis::X => Interval::new(self.min_x(), self.max_x()),
            Axis::Y => Interval::new(self.min_y(), self.max_y()),
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn is_valid(&self) -> bool {
        self.center.is_finite()
            && self.width.is_finite()
            && self.height.is_finite()
            && self.width >= 0.0
            && self.height >= 0.0
    }

    /// Closed-set membership.
    pub fn contains_point(&self, p: Point2) -> bool {
        self.min_x() <= p.x && p.x <= self.max_x() && self.min_y() <= p.y && p.y <= self.max_y()
    }

    /// Closed-set containment of `other` in `self`.
    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.interval(Axis::X).contains(&other.interval(Axis::X))
            && self.interval(Axis::Y).contains(&other.interval(Axis::Y))
    }

    /// The four corners, counter-clockwise from the minimum corner.
    pub fn corners(&self) -> [Point2; 4] {
        let (x0, x1, y0, y1) = (self.min_x(), self.max_x(), self.min_y(), self.max_y());
        [
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ]
    }

    pub fn scaled(&self, factor: f64) -> AxisBox {
        AxisBox::new(self.center, self.width * factor, self.height * factor)
    }
}

/// Which of the two classified boxes plays the inner/penetrating role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OverlapClass {
    Disjoint,
    Touching,
    Containment,
    OneCornerInside,
    TwoCornersInside,
    Cross,
}

impl OverlapClass {
    pub fn is_overlap(self) -> bool {
        !matches!(self, OverlapClass::Disjoint | OverlapClass::Touching)
    }
}

/// Result of [`classify_overlap`].
///
/// `inner` names the contained box for `Containment` and the box whose two
/// corners sit inside the other for `TwoCornersInside`. It is `None` for the
/// mutual formations (`OneCornerInside`, `Cross`) and for non-overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub class: OverlapClass,
    pub inner: Option<Which>,
}

impl Overlap {
    fn plain(class: OverlapClass) -> Self {
        Self { class, inner: None }
    }

    pub fn is_overlap(&self) -> bool {
        self.class.is_overlap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisRelation {
    Equal,
    AInB,
    BInA,
    Staggered,
}

fn axis_relation(a: Interval, b: Interval) -> AxisRelation {
    match (b.contains(&a), a.contains(&b)) {
        (true, true) => AxisRelation::Equal,
        (true, false) => AxisRelation::AInB,
        (false, true) => AxisRelation::BInA,
        (false, false) => AxisRelation::Staggered,
    }
}

/// Classifies how `a` and `b` relate, enumerating the overlap formations:
/// containment, one corner inside, two corners inside, and the cross.
///
/// Interiors meet iff the open intervals overlap on both axes, so a
/// zero-width box never overlaps anything.
pub fn classify_overlap(a: &AxisBox, b: &AxisBox) -> Overlap {
    let (ax, ay) = (a.interval(Axis::X), a.interval(Axis::Y));
    let (bx, by) = (b.interval(Axis::X), b.interval(Axis::Y));
    let ox = ax.overlap(&bx);
    let oy = ay.overlap(&by);

    if ox < 0.0 || oy < 0.0 {
        return Overlap::plain(OverlapClass::Disjoint);
    }
    if ox == 0.0 || oy == 0.0 {
        return Overlap::plain(OverlapClass::Touching);
    }

    use AxisRelation::*;
    let rx = axis_relation(ax, bx);
    let ry = axis_relation(ay, by);
    let overlap = |class, inner| Overlap { class, inner };
    match (rx, ry) {
        (Equal | AInB, Equal | AInB) => overlap(OverlapClass::Containment, Some(Which::A)),
        (Equal | BInA, Equal | BInA) => overlap(OverlapClass::Containment, Some(Which::B)),
        (AInB, BInA) | (BInA, AInB) => Overlap::plain(OverlapClass::Cross),
        (Staggered, Staggered) => Overlap::plain(OverlapClass::OneCornerInside),
        (AInB | Equal, Staggered) | (Staggered, AInB | Equal) => {
            overlap(OverlapClass::TwoCornersInside, Some(Which::A))
        }
        (BInA, Staggered) | (Staggered, BInA) => {
            overlap(OverlapClass::TwoCornersInside, Some(Which::B))
        }
    }
}

/// Axis-wise intersection of the closed boxes, or `None` when they are
/// separated on some axis. Touching boxes yield a zero-width result.
pub fn intersect(a: &AxisBox, b: &AxisBox) -> Option<AxisBox> {
    let x0 = a.min_x().max(b.min_x());
    let x1 = a.max_x().min(b.max_x());
    let y0 = a.min_y().max(b.min_y());
    let y1 = a.max_y().min(b.max_y());
    if x0 > x1 || y0 > y1 {
        return None;
    }
    if a.contains_box(b) {
        return Some(*b);
    }
    if b.contains_box(a) {
        return Some(*a);
    }
    Some(AxisBox::from_corners(Point2::new(x0, y0), Point2::new(x1, y1)))
}

/// True iff the open interiors of `a` and `b` do not intersect.
pub fn interiors_disjoint(a: &AxisBox, b: &AxisBox) -> bool {
    penetration_depth(a, b) <= 0.0
}

/// Minimum axis translation that separates the interiors; `<= 0` when they
/// are already disjoint.
pub fn penetration_depth(a: &AxisBox, b: &AxisBox) -> f64 {
    let ox = a.interval(Axis::X).overlap(&b.interval(Axis::X));
    let oy = a.interval(Axis::Y).overlap(&b.interval(Axis::Y));
    ox.min(oy)
}
