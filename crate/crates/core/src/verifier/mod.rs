//! Constraint checking for packed solutions.
//!
//! [`verify`] is the independent checker run on solver output. [`oracle_max`]
//! searches a scale grid exhaustively for small instances, and
//! [`collinear_residuals`] measures how tightly the middle box touches its neighbors in the
//! three-boxes-on-a-line configuration.

mod collinear;
mod oracle;

pub use collinear::{collinear_residuals, CollinearResiduals};
pub use oracle::{oracle_max, oracle_max_with, OracleObjective, OracleResult, MAX_ORACLE_ITEMS};

use crate::geometry::{intersect, penetration_depth, AxisBox};
use crate::instance::{validate_instance, RarpInstance, Violation};
use crate::solver::{Objective, PackedBox, ScaleSolution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Anchoring tolerance in pixels.
pub const ANCHOR_TOLERANCE: f64 = 1e-9;
/// Overlap depth and overhang below this many pixels are rounding noise
/// from the center/extent round trip of trimmed rectangles.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("oracle supports at most {max} items, instance has {got}")]
    InstanceTooLarge { got: usize, max: usize },
    #[error("not the collinear three-box configuration: {0}")]
    Shape(String),
    #[error("invalid oracle parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapViolation {
    pub i: usize,
    pub j: usize,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtrusionViolation {
    pub item: usize,
    pub overhang: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchoringViolation {
    pub item: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub allow_trim: bool,
    pub overlap_violations: Vec<OverlapViolation>,
    pub protrusion_violations: Vec<ProtrusionViolation>,
    pub anchoring_violations: Vec<AnchoringViolation>,
    pub input_violations: Vec<Violation>,
    /// Malformed inputs: mismatched lengths, non-positive scales, bad ids.
    pub structural_violations: Vec<String>,
    pub objective: Objective,
}

impl VerificationReport {
    pub fn violation_count(&self) -> usize {
        self.overlap_violations.len()
            + self.protrusion_violations.len()
            + self.anchoring_violations.len()
            + self.input_violations.len()
            + self.structural_violations.len()
    }
}

fn overhang(rect: &AxisBox, canvas: &AxisBox) -> f64 {
    [
        canvas.min_x() - rect.min_x(),
        rect.max_x() - canvas.max_x(),
        canvas.min_y() - rect.min_y(),
        rect.max_y() - canvas.max_y(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn corner_offset(a: &AxisBox, b: &AxisBox) -> f64 {
    [
        (a.min_x() - b.min_x()).abs(),
        (a.max_x() - b.max_x()).abs(),
        (a.min_y() - b.min_y()).abs(),
        (a.max_y() - b.max_y()).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Checks a packed solution against every constraint:
///
/// * final rectangles are pairwise interior-disjoint;
/// * final rectangles lie inside the canvas (with `allow_trim = false` the
///   untrimmed scaled boxes must too);
/// * each rectangle is the anchored scaled box, or with `allow_trim` its
///   exact intersection with the canvas;
/// * the instance itself satisfies the input rules.
pub fn verify(
    instance: &RarpInstance,
    solution: &ScaleSolution,
    packed: &[PackedBox],
    allow_trim: bool,
) -> VerificationReport {
    let n = instance.items.len();
    let mut structural = Vec::new();
    if solution.scales.len() != n {
        structural.push(format!("{} scales for {n} items", solution.scales.len()));
    }
    if packed.len() != n {
        structural.push(format!("{} packed boxes for {n} items", packed.len()));
    }
    for (i, s) in solution.scales.iter().enumerate() {
        if !(s.is_finite() && *s > 0.0) {
            structural.push(format!("scale {i} is {s}"));
        }
    }
    for (i, p) in packed.iter().enumerate() {
        if p.item_id != i {
            structural.push(format!("packed entry {i} names item {}", p.item_id));
        }
        if !p.rect.is_valid() {
            structural.push(format!("packed entry {i} has an invalid rectangle"));
        }
    }

    let canvas = instance.canvas.as_box();
    let mut overlap_violations = Vec::new();
    for i in 0..packed.len() {
        for j in i + 1..packed.len() {
            let depth = penetration_depth(&packed[i].rect, &packed[j].rect);
            if depth > GEOMETRY_TOLERANCE {
                overlap_violations.push(OverlapViolation { i, j, depth });
            }
        }
    }

    let mut protrusion_violations = Vec::new();
    let mut anchoring_violations = Vec::new();
    let m = n.min(solution.scales.len()).min(packed.len());
    for (i, p) in packed.iter().enumerate().take(m) {
        let rect = p.rect;
        let scaled = instance.items[i].scaled_box(solution.scales[i]);
        let checked = if allow_trim { rect } else { scaled };
        let out = overhang(&checked, &canvas);
        if out > GEOMETRY_TOLERANCE {
            protrusion_violations.push(ProtrusionViolation { item: i, overhang: out });
        }
        let expected = if allow_trim {
            intersect(&scaled, &canvas).unwrap_or(scaled)
        } else {
            scaled
        };
        let offset = corner_offset(&rect, &expected);
        if offset.is_nan() || offset > ANCHOR_TOLERANCE {
            anchoring_violations.push(AnchoringViolation { item: i, offset });
        }
    }

    let input_violations = validate_instance(instance);
    let objective = if solution.scales.len() == n {
        crate::solver::objective(instance, solution).expect("lengths checked")
    } else {
        Objective {
            linear: 0.0,
            covered_area: 0.0,
        }
    };
    let pass = overlap_violations.is_empty()
        && protrusion_violations.is_empty()
        && anchoring_violations.is_empty()
        && input_violations.is_empty()
        && structural.is_empty();
    VerificationReport {
        pass,
        allow_trim,
        overlap_violations,
        protrusion_violations,
        anchoring_violations,
        input_violations,
        structural_violations: structural,
        objective,
    }
}

pub fn report_to_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
