//! Solution files.
//!
//! `{"scales": [...], "flags": [{"clipped", "post_shrunk", "downscaled"}],
//! "packed": [{"item_id", "rect": {"cx", "cy", "w", "h"}, "trimmed"}],
//! "objective": {"linear", "covered_area"}}`. Every float is written with 17
//! significant digits in positional notation so reruns are byte-identical
//! and values round-trip exactly.

use super::{Objective, PackedBox, ScaleFlags, ScaleSolution};
use crate::geometry::{AxisBox, Point2};
use crate::instance::InstanceError;
use crate::numfmt::Sig17;
use serde::{Deserialize, Serialize, Serializer};
use std::path::Path;

fn sig17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    Sig17(*v).serialize(s)
}

fn sig17_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| Sig17(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectRecord {
    #[serde(serialize_with = "sig17")]
    pub cx: f64,
    #[serde(serialize_with = "sig17")]
    pub cy: f64,
    #[serde(serialize_with = "sig17")]
    pub w: f64,
    #[serde(serialize_with = "sig17")]
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedRecord {
    pub item_id: usize,
    pub rect: RectRecord,
    pub trimmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionObjective {
    #[serde(serialize_with = "sig17")]
    pub linear: f64,
    #[serde(serialize_with = "sig17")]
    pub covered_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(serialize_with = "sig17_vec")]
    pub scales: Vec<f64>,
    pub flags: Vec<ScaleFlags>,
    pub packed: Vec<PackedRecord>,
    pub objective: SolutionObjective,
}

impl SolutionFile {
    pub fn new(solution: &ScaleSolution, packed: &[PackedBox], objective: Objective) -> Self {
        Self {
            scales: solution.scales.clone(),
            flags: solution.flags.clone(),
            packed: packed
                .iter()
                .map(|p| PackedRecord {
                    item_id: p.item_id,
                    rect: RectRecord {
                        cx: p.rect.center.x,
                        cy: p.rect.center.y,
                        w: p.rect.width,
                        h: p.rect.height,
                    },
                    trimmed: p.trimmed,
                })
                .collect(),
            objective: SolutionObjective {
                linear: objective.linear,
                covered_area: objective.covered_area,
            },
        }
    }

    pub fn solution(&self) -> ScaleSolution {
        ScaleSolution {
            scales: self.scales.clone(),
            flags: self.flags.clone(),
        }
    }

    pub fn packed_boxes(&self) -> Vec<PackedBox> {
        self.packed
            .iter()
            .map(|p| PackedBox {
                item_id: p.item_id,
                rect: AxisBox::new(Point2::new(p.rect.cx, p.rect.cy), p.rect.w.max(0.0), p.rect.h.max(0.0)),
                trimmed: p.trimmed,
            })
            .collect()
    }
}

pub fn solution_to_json(file: &SolutionFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("solution serializes");
    s.push('\n');
    s
}

pub fn write_solution(file: &SolutionFile, path: &Path) -> Result<(), InstanceError> {
    crate::write_atomic(path, solution_to_json(file).as_bytes())?;
    Ok(())
}

pub fn read_solution(path: &Path) -> Result<SolutionFile, InstanceError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| InstanceError::Parse {
        source_name: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_precision_layout() {
        let solution = ScaleSolution::from_scales(vec![0.5, 2.0 / 3.0]);
        let packed = vec![PackedBox {
            item_id: 0,
            rect: AxisBox::new(Point2::new(1.0, 2.0), 3.0, 4.0),
            trimmed: false,
        }];
        let file = SolutionFile::new(&solution, &packed, Objective { linear: 1.0, covered_area: 0.25 });
        let json = solution_to_json(&file);
        assert!(json.contains("0.50000000000000000"), "{json}");
        assert!(json.contains("0.66666666666666663"), "{json}");
        assert!(json.contains("\"cx\": 1.0000000000000000"), "{json}");
        let order: Vec<usize> = ["\"scales\"", "\"flags\"", "\"packed\"", "\"objective\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        let back: SolutionFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
    }
}
