//! Exhaustive grid search over scale vectors for tiny instances.
//!
//! Scales range over `{k * resolution : k = 1..=K}` with
//! `K = floor(scale_upper / resolution)`. Containment is strict (no
//! trimming). The feasible set is closed under shrinking any single scale,
//! so the scan over each coordinate stops at the first infeasible value and
//! the last coordinate is resolved from its closed-form upper bound; this
//! visits the same maximum as the full product scan.

use super::VerifyError;
use crate::geometry::interiors_disjoint;
use crate::instance::{ItemSpec, RarpInstance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const MAX_ORACLE_ITEMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OracleObjective {
    /// `sum(scale * w * h)`.
    #[default]
    Linear,
    /// `sum(scale^2 * w * h)`.
    CoveredArea,
}

impl OracleObjective {
    fn eval(self, items: &[ItemSpec], scales: &[f64]) -> f64 {
        items
            .iter()
            .zip(scales)
            .map(|(it, &s)| match self {
                OracleObjective::Linear => s * it.base_area(),
                OracleObjective::CoveredArea => s * s * it.base_area(),
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Empty when no grid point is feasible.
    pub best_scales: Vec<f64>,
    pub best_objective: f64,
    pub grid_resolution: f64,
    /// Feasibility predicate evaluations performed.
    pub evaluations: u64,
    /// Feasible grid points in the full product grid.
    pub feasible_points: u64,
}

#[derive(Debug, Clone)]
struct Partial {
    best: Option<(f64, Vec<f64>)>,
    evaluations: u64,
    feasible: u64,
}

impl Partial {
    fn empty() -> Self {
        Self {
            best: None,
            evaluations: 0,
            feasible: 0,
        }
    }

    fn offer(&mut self, value: f64, scales: &[f64]) {
        let better = match &self.best {
            None => true,
            Some((v, s)) => match value.total_cmp(v) {
                Ordering::Greater => true,
                Ordering::Equal => scales.partial_cmp(s.as_slice()) == Some(Ordering::Less),
                Ordering::Less => false,
            },
        };
        if better {
            self.best = Some((value, scales.to_vec()));
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.evaluations += other.evaluations;
        self.feasible += other.feasible;
        if let Some((v, s)) = other.best {
            self.offer(v, &s);
        }
        self
    }
}

struct Search<'a> {
    items: &'a [ItemSpec],
    canvas: crate::geometry::AxisBox,
    resolution: f64,
    steps: u64,
    objective: OracleObjective,
}

impl Search<'_> {
    fn grid(&self, k: u64) -> f64 {
        k as f64 * self.resolution
    }

    /// Is item `idx` at `scale` inside the canvas and disjoint from the
    /// already-assigned prefix?
    fn fits(&self, idx: usize, scale: f64, prefix: &[f64]) -> bool {
        let b = self.items[idx].scaled_box(scale);
        self.canvas.contains_box(&b)
            && prefix
                .iter()
                .enumerate()
                .all(|(j, &s)| interiors_disjoint(&b, &self.items[j].scaled_box(s)))
    }

    /// Closed-form largest scale for item `idx` given the prefix.
    fn last_bound(&self, idx: usize, prefix: &[f64]) -> f64 {
        let it = &self.items[idx];
        let c = &self.canvas;
        let mut bound = [
            2.0 * it.anchor.x / it.base_width,
            2.0 * (c.width - it.anchor.x) / it.base_width,
            2.0 * it.anchor.y / it.base_height,
            2.0 * (c.height - it.anchor.y) / it.base_height,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        for (j, &s) in prefix.iter().enumerate() {
            let o = &self.items[j];
            let dx = (it.anchor.x - o.anchor.x).abs();
            let dy = (it.anchor.y - o.anchor.y).abs();
            let bx = (2.0 * dx - s * o.base_width) / it.base_width;
            let by = (2.0 * dy - s * o.base_height) / it.base_height;
            bound = bound.min(bx.max(by));
        }
        bound
    }

    fn finish(&self, prefix: &mut Vec<f64>, acc: &mut Partial) {
        let idx = prefix.len();
        let bound = self.last_bound(idx, prefix);
        let guess = if bound.is_finite() && bound > 0.0 {
            ((bound / self.resolution).floor() as u64).min(self.steps)
        } else {
            0
        };
        // The closed form can be off by a grid step through rounding.
        let mut k = guess;
        while k > 0 && {
            acc.evaluations += 1;
            !self.fits(idx, self.grid(k), prefix)
        } {
            k -= 1;
        }
        while k < self.steps && {
            acc.evaluations += 1;
            self.fits(idx, self.grid(k + 1), prefix)
        } {
            k += 1;
        }
        if k == 0 {
            return;
        }
        acc.feasible += k;
        prefix.push(self.grid(k));
        acc.offer(self.objective.eval(self.items, prefix), prefix);
        prefix.pop();
    }

    fn descend(&self, prefix: &mut Vec<f64>, acc: &mut Partial) {
        if prefix.len() + 1 == self.items.len() {
            self.finish(prefix, acc);
            return;
        }
        let idx = prefix.len();
        for k in 1..=self.steps {
            let s = self.grid(k);
            acc.evaluations += 1;
            if !self.fits(idx, s, prefix) {
                break;
            }
            prefix.push(s);
            self.descend(prefix, acc);
            prefix.pop();
        }
    }
}

/// Grid-search maximum of the linear objective.
pub fn oracle_max(instance: &RarpInstance, resolution: f64, scale_upper: f64) -> Result<OracleResult, VerifyError> {
    oracle_max_with(instance, resolution, scale_upper, OracleObjective::Linear)
}

pub fn oracle_max_with(
    instance: &RarpInstance,
    resolution: f64,
    scale_upper: f64,
    objective: OracleObjective,
) -> Result<OracleResult, VerifyError> {
    let n = instance.items.len();
    if n > MAX_ORACLE_ITEMS {
        return Err(VerifyError::InstanceTooLarge {
            got: n,
            max: MAX_ORACLE_ITEMS,
        });
    }
    if !(resolution > 0.0 && resolution.is_finite()) || !(scale_upper >= resolution && scale_upper.is_finite()) {
        return Err(VerifyError::InvalidParameter(format!(
            "resolution {resolution}, scale_upper {scale_upper}"
        )));
    }
    let steps = (scale_upper / resolution * (1.0 + 1e-12)).floor() as u64;
    let search = Search {
        items: &instance.items,
        canvas: instance.canvas.as_box(),
        resolution,
        steps,
        objective,
    };

    let total = if n == 0 {
        let mut p = Partial::empty();
        p.offer(0.0, &[]);
        p.feasible = 1;
        p
    } else if n == 1 {
        let mut p = Partial::empty();
        search.finish(&mut Vec::new(), &mut p);
        p
    } else {
        (1..=steps)
            .into_par_iter()
            .map(|k| {
                let mut acc = Partial::empty();
                let s = search.grid(k);
                acc.evaluations += 1;
                if search.fits(0, s, &[]) {
                    let mut prefix = vec![s];
                    search.descend(&mut prefix, &mut acc);
                }
                acc
            })
            .reduce(Partial::empty, Partial::merge)
    };

    let (best_objective, best_scales) = total.best.unwrap_or((0.0, Vec::new()));
    Ok(OracleResult {
        best_scales,
        best_objective,
        grid_resolution: resolution,
        evaluations: total.evaluations,
        feasible_points: total.feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::instance::{CanvasSpec, SeparationSpec};
    use crate::solver::pair_scale;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn inst(w: f64, h: f64, items: Vec<ItemSpec>) -> RarpInstance {
        RarpInstance::new(CanvasSpec::new(w, h), SeparationSpec::default(), items)
    }

    /// Plain product-grid scan with no pruning.
    fn brute_force(instance: &RarpInstance, resolution: f64, scale_upper: f64) -> (f64, Vec<f64>, u64) {
        let n = instance.items.len();
        let steps = (scale_upper / resolution * (1.0 + 1e-12)).floor() as u64;
        let canvas = instance.canvas.as_box();
        let mut best = (0.0, Vec::new());
        let mut feasible = 0;
        let mut idx = vec![1u64; n];
        loop {
            let scales: Vec<f64> = idx.iter().map(|&k| k as f64 * resolution).collect();
            let boxes: Vec<_> = instance.items.iter().zip(&scales).map(|(it, &s)| it.scaled_box(s)).collect();
            let ok = boxes.iter().all(|b| canvas.contains_box(b))
                && (0..n).all(|i| (i + 1..n).all(|j| interiors_disjoint(&boxes[i], &boxes[j])));
            if ok {
                feasible += 1;
                let v = OracleObjective::Linear.eval(&instance.items, &scales);
                if v > best.0 || (v == best.0 && scales < best.1) {
                    best = (v, scales);
                }
            }
            let mut d = n;
            loop {
                if d == 0 {
                    return (best.0, best.1, feasible);
                }
                d -= 1;
                if idx[d] < steps {
                    idx[d] += 1;
                    break;
                }
                idx[d] = 1;
            }
        }
    }

    #[test]
    fn single_centered_item_hits_boundary_fit() {
        let i = inst(20.0, 10.0, vec![ItemSpec::new(0, "a", 4.0, 2.0, Point2::new(10.0, 5.0))]);
        let r = oracle_max(&i, 0.01, 8.0).unwrap();
        assert!((r.best_scales[0] - 5.0).abs() <= 0.01 + 1e-12, "{:?}", r.best_scales);
        assert_eq!(r.feasible_points, 500);
    }

    #[test]
    fn symmetric_pair_matches_pair_scale() {
        let items = vec![
            ItemSpec::new(0, "a", 2.0, 2.0, Point2::new(20.0, 20.0)),
            ItemSpec::new(1, "a", 2.0, 2.0, Point2::new(24.0, 21.0)),
        ];
        let s = pair_scale(&items[0], &items[1]).unwrap();
        let i = inst(60.0, 60.0, items);
        let res = 1e-3;
        let r = oracle_max(&i, res, 2.0 * s).unwrap();
        // identical items: the optimum is any split of 2s along the binding
        // axis, the common scale included.
        let sum: f64 = r.best_scales.iter().sum();
        assert!((sum - 2.0 * s).abs() <= 2.0 * res, "{:?} vs {s}", r.best_scales);
        assert!((r.best_objective - 2.0 * s * 4.0).abs() <= 2.0 * res * 4.0);
    }

    #[test]
    fn coincident_anchors_have_no_feasible_point() {
        let i = inst(
            10.0,
            10.0,
            vec![
                ItemSpec::new(0, "a", 1.0, 1.0, Point2::new(5.0, 5.0)),
                ItemSpec::new(1, "a", 1.0, 1.0, Point2::new(5.0, 5.0)),
            ],
        );
        let r = oracle_max(&i, 0.1, 2.0).unwrap();
        assert_eq!(r.feasible_points, 0);
        assert!(r.best_scales.is_empty());
    }

    #[test]
    fn too_many_items() {
        let items = (0..5).map(|k| ItemSpec::new(k, "a", 1.0, 1.0, Point2::new(1.0 + k as f64, 1.0 + k as f64))).collect();
        assert!(matches!(
            oracle_max(&inst(10.0, 10.0, items), 0.1, 1.0),
            Err(VerifyError::InstanceTooLarge { got: 5, .. })
        ));
    }

    #[test]
    fn pruned_search_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..8 {
                let items = (0..n)
                    .map(|k| {
                        ItemSpec::new(
                            k,
                            "a",
                            rng.gen_range(1.0..6.0),
                            rng.gen_range(1.0..6.0),
                            Point2::new(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0)),
                        )
                    })
                    .collect();
                let i = inst(20.0, 20.0, items);
                let (res, upper) = (0.125, 4.0);
                let fast = oracle_max(&i, res, upper).unwrap();
                let (best, scales, feasible) = brute_force(&i, res, upper);
                assert_eq!(fast.feasible_points, feasible);
                assert_eq!(fast.best_objective, best);
                assert_eq!(fast.best_scales, scales);
            }
        }
    }

    #[test]
    fn covered_area_objective_differs() {
        let i = inst(
            40.0,
            40.0,
            vec![
                ItemSpec::new(0, "a", 2.0, 4.0, Point2::new(10.0, 20.0)),
                ItemSpec::new(1, "b", 6.0, 1.0, Point2::new(20.0, 22.0)),
            ],
        );
        let lin = oracle_max_with(&i, 0.01, 5.0, OracleObjective::Linear).unwrap();
        let area = oracle_max_with(&i, 0.01, 5.0, OracleObjective::CoveredArea).unwrap();
        let lin_area = OracleObjective::CoveredArea.eval(&i.items, &lin.best_scales);
        assert!(area.best_objective >= lin_area);
    }
}
