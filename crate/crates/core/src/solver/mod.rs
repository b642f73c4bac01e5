//! Pairwise greedy scaling.
//!
//! Items are sorted along the canvas's major axis and consecutive pairs are
//! scaled by a common factor until they touch. Overlaps that creep in
//! between non-consecutive items are then repaired over all pairs, boxes
//! protruding out of the canvas are trimmed, and scales may optionally be
//! randomly reduced.

mod io;

pub use io::{read_solution, solution_to_json, write_solution, RectRecord, SolutionFile, SolutionObjective};

use crate::geometry::{classify_overlap, interiors_disjoint, intersect, AxisBox, Point2};
use crate::instance::{validate_instance, ItemSpec, RarpInstance, Violation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scales below this are treated as a degenerate overlap.
pub const MIN_SCALE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("anchors of items {0} and {1} coincide")]
    CoincidentAnchors(usize, usize),
    #[error("items {0} and {1} cannot be separated above the minimum scale")]
    DegenerateOverlap(usize, usize),
    #[error("boxes do not overlap")]
    NotOverlapping,
    #[error("overlap repair did not settle within {0} passes")]
    PassCapExceeded(usize),
    #[error("instance is invalid: {0:?}")]
    InvalidInstance(Vec<Violation>),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("solution has {got} scales for {expected} items")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScaleFlags {
    pub clipped: bool,
    pub post_shrunk: bool,
    pub downscaled: bool,
}

/// Scale factor per item, index-aligned with the instance's items.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScaleSolution {
    pub scales: Vec<f64>,
    pub flags: Vec<ScaleFlags>,
}

impl ScaleSolution {
    pub fn from_scales(scales: Vec<f64>) -> Self {
        let flags = vec![ScaleFlags::default(); scales.len()];
        Self { scales, flags }
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Multiplies every scale by `k`.
    pub fn uniformly_scaled(&self, k: f64) -> ScaleSolution {
        ScaleSolution {
            scales: self.scales.iter().map(|s| s * k).collect(),
            flags: self.flags.clone(),
        }
    }
}

/// Final rectangle of one item after trimming to the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackedBox {
    pub item_id: usize,
    pub rect: AxisBox,
    pub trimmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub enable_random_downscale: bool,
    pub downscale_range: (f64, f64),
    pub seed: u64,
    /// `None` means `n + 2` passes.
    pub post_process_pass_cap: Option<usize>,
    pub boundary_cap_singletons: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            enable_random_downscale: false,
            downscale_range: (0.3, 1.0),
            seed: 0,
            post_process_pass_cap: None,
            boundary_cap_singletons: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), SolveError> {
        let (lo, hi) = self.downscale_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(SolveError::InvalidOptions(format!(
                "downscale range [{lo}, {hi}] must satisfy 0 < lo <= hi <= 1"
            )));
        }
        if self.post_process_pass_cap == Some(0) {
            return Err(SolveError::InvalidOptions("pass cap must be at least 1".into()));
        }
        Ok(())
    }

    pub fn pass_cap(&self, n: usize) -> usize {
        self.post_process_pass_cap.unwrap_or(n + 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStep {
    PairScale,
    ClippedPairScale,
    SingletonFit,
    PostShrink,
    Downscale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: TraceStep,
    pub items: Vec<usize>,
    pub before: Vec<Option<f64>>,
    pub after: Vec<f64>,
}

/// Ordered log of every scale assignment made by a solve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveTrace {
    /// Item indices in greedy order.
    pub order: Vec<usize>,
    pub events: Vec<TraceEvent>,
    /// Post-processing passes, including the final clean pass.
    pub passes: usize,
}

impl SolveTrace {
    fn record(&mut self, step: TraceStep, items: &[usize], before: &[Option<f64>], after: &[f64]) {
        self.events.push(TraceEvent {
            step,
            items: items.to_vec(),
            before: before.to_vec(),
            after: after.to_vec(),
        });
    }

    /// Re-applies every event in order; items never assigned stay `None`.
    pub fn replay(&self, n: usize) -> Vec<Option<f64>> {
        let mut scales = vec![None; n];
        for e in &self.events {
            for (&i, &v) in e.items.iter().zip(&e.after) {
                scales[i] = Some(v);
            }
        }
        scales
    }

    pub fn count(&self, step: TraceStep) -> usize {
        self.events.iter().filter(|e| e.step == step).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    /// `sum(scale * w * h)`, linear in the scales.
    pub linear: f64,
    /// `sum(scale^2 * w * h)`, the area of the scaled untrimmed boxes.
    pub covered_area: f64,
}

/// Largest common scale at which the two anchored boxes are
/// interior-disjoint: `max(|dx| / ((wa + wb) / 2), |dy| / ((ha + hb) / 2))`.
pub fn pair_scale(a: &ItemSpec, b: &ItemSpec) -> Result<f64, SolveError> {
    let dx = (a.anchor.x - b.anchor.x).abs();
    let dy = (a.anchor.y - b.anchor.y).abs();
    if dx == 0.0 && dy == 0.0 {
        return Err(SolveError::CoincidentAnchors(a.id, b.id));
    }
    let alpha = dx / (0.5 * (a.base_width + b.base_width));
    let beta = dy / (0.5 * (a.base_height + b.base_height));
    Ok(alpha.max(beta))
}

/// Common factor in `(0, 1]` by which both boxes must shrink about their
/// centers to just touch. Of the two candidates (touch along x, touch along
/// y) the larger, less destructive one is returned.
pub fn pair_shrink(a: &AxisBox, b: &AxisBox) -> Result<f64, SolveError> {
    if !classify_overlap(a, b).is_overlap() {
        return Err(SolveError::NotOverlapping);
    }
    // argument positions stand in for item indices here
    let k = shrink_candidate(a, b).ok_or(SolveError::DegenerateOverlap(0, 1))?;
    Ok(settle_down(k, |k| interiors_disjoint(&a.scaled(k), &b.scaled(k))))
}

fn shrink_candidate(a: &AxisBox, b: &AxisBox) -> Option<f64> {
    let dx = (a.center.x - b.center.x).abs();
    let dy = (a.center.y - b.center.y).abs();
    if dx == 0.0 && dy == 0.0 {
        return None;
    }
    let kx = dx / (0.5 * (a.width + b.width));
    let ky = dy / (0.5 * (a.height + b.height));
    Some(kx.max(ky).min(1.0))
}

/// Steps `value` down one ulp at a time until `ok` holds. Closed-form
/// touching factors can land a rounding error on the wrong side.
fn settle_down(mut value: f64, ok: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..64 {
        if ok(value) {
            return value;
        }
        value = value.next_down();
    }
    value
}

fn greedy_order(instance: &RarpInstance) -> Vec<usize> {
    let major = instance.canvas.major_axis();
    let minor = major.other();
    let mut order: Vec<usize> = (0..instance.items.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&instance.items[i], &instance.items[j]);
        a.anchor
            .coord(major)
            .total_cmp(&b.anchor.coord(major))
            .then(a.anchor.coord(minor).total_cmp(&b.anchor.coord(minor)))
            .then(a.id.cmp(&b.id))
            .then(i.cmp(&j))
    });
    order
}

/// Largest scale keeping a lone item inside the canvas.
fn boundary_fit(instance: &RarpInstance, item: &ItemSpec) -> f64 {
    let fit = item.boundary_fit(&instance.canvas);
    let canvas = instance.canvas.as_box();
    settle_down(fit, |s| canvas.contains_box(&item.scaled_box(s)))
}

/// Runs the full heuristic: sorted pairwise scaling with clipping,
/// all-pairs overlap repair and, when enabled, random downscaling.
/// Trimming is a separate step, see [`trim`].
pub fn greedy_solve(instance: &RarpInstance, options: &SolveOptions) -> Result<(ScaleSolution, SolveTrace), SolveError> {
    options.validate()?;
    let violations = validate_instance(instance);
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let n = instance.items.len();
    let items = &instance.items;
    let mut trace = SolveTrace {
        order: greedy_order(instance),
        ..SolveTrace::default()
    };
    let order = trace.order.clone();
    let mut scales: Vec<Option<f64>> = vec![None; n];
    let mut flags = vec![ScaleFlags::default(); n];

    if n == 1 {
        let s = if options.boundary_cap_singletons {
            boundary_fit(instance, &items[0])
        } else {
            1.0
        };
        scales[0] = Some(s);
        trace.record(TraceStep::SingletonFit, &[0], &[None], &[s]);
    }

    for pair in order.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let (a, b) = (&items[p], &items[q]);
        let exact = pair_scale(a, b)?;
        let mut s = settle_down(exact, |s| interiors_disjoint(&a.scaled_box(s), &b.scaled_box(s)));
        if s < MIN_SCALE {
            return Err(SolveError::DegenerateOverlap(p, q));
        }
        let prev = scales[p];
        let mut step = TraceStep::PairScale;
        if matches!(prev, Some(v) if v < 1.0) && s > 1.0 {
            s = 1.0;
            flags[q].clipped = true;
            step = TraceStep::ClippedPairScale;
        }
        let new_p = prev.map_or(s, |v| v.min(s));
        scales[p] = Some(new_p);
        scales[q] = Some(s);
        trace.record(step, &[p, q], &[prev, None], &[new_p, s]);
    }

    let mut solution = ScaleSolution {
        scales: scales.into_iter().map(|s| s.expect("every item is scaled")).collect(),
        flags,
    };
    trace.passes = repair_overlaps(instance, &mut solution, &order, options.pass_cap(n), &mut trace)?;
    if options.enable_random_downscale {
        downscale_in_place(&mut solution, options, &mut trace);
    }
    Ok((solution, trace))
}

/// All-pairs overlap repair. Returns the repaired solution and the number
/// of passes used, including the final pass that found nothing to fix.
pub fn post_process(
    instance: &RarpInstance,
    solution: &ScaleSolution,
    options: &SolveOptions,
) -> Result<(ScaleSolution, usize), SolveError> {
    check_len(instance, solution)?;
    let order = greedy_order(instance);
    let mut out = solution.clone();
    let mut trace = SolveTrace::default();
    let passes = repair_overlaps(instance, &mut out, &order, options.pass_cap(instance.items.len()), &mut trace)?;
    Ok((out, passes))
}

fn repair_overlaps(
    instance: &RarpInstance,
    solution: &mut ScaleSolution,
    order: &[usize],
    pass_cap: usize,
    trace: &mut SolveTrace,
) -> Result<usize, SolveError> {
    let items = &instance.items;
    let scales = &mut solution.scales;
    for pass in 1..=pass_cap {
        let mut corrected = false;
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[pos + 1..] {
                let (bi, bj) = (items[i].scaled_box(scales[i]), items[j].scaled_box(scales[j]));
                if !classify_overlap(&bi, &bj).is_overlap() {
                    continue;
                }
                let k = shrink_candidate(&bi, &bj).ok_or(SolveError::CoincidentAnchors(i, j))?;
                let (old_i, old_j) = (scales[i], scales[j]);
                let (mut si, mut sj) = (old_i * k, old_j * k);
                for _ in 0..64 {
                    if interiors_disjoint(&items[i].scaled_box(si), &items[j].scaled_box(sj)) {
                        break;
                    }
                    si = si.next_down();
                    sj = sj.next_down();
                }
                if si < MIN_SCALE || sj < MIN_SCALE {
                    return Err(SolveError::DegenerateOverlap(i, j));
                }
                scales[i] = si;
                scales[j] = sj;
                solution.flags[i].post_shrunk = true;
                solution.flags[j].post_shrunk = true;
                trace.record(TraceStep::PostShrink, &[i, j], &[Some(old_i), Some(old_j)], &[si, sj]);
                corrected = true;
            }
        }
        if !corrected {
            return Ok(pass);
        }
    }
    Err(SolveError::PassCapExceeded(pass_cap))
}

/// Multiplies each scale by an independent factor drawn uniformly from
/// `options.downscale_range`.
pub fn random_downscale(solution: &ScaleSolution, options: &SolveOptions) -> Result<ScaleSolution, SolveError> {
    options.validate()?;
    let mut out = solution.clone();
    downscale_in_place(&mut out, options, &mut SolveTrace::default());
    Ok(out)
}

fn downscale_in_place(solution: &mut ScaleSolution, options: &SolveOptions, trace: &mut SolveTrace) {
    let (lo, hi) = options.downscale_range;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for i in 0..solution.scales.len() {
        let factor = rng.gen_range(lo..=hi);
        let before = solution.scales[i];
        let after = before * factor;
        solution.scales[i] = after;
        if factor < 1.0 {
            solution.flags[i].downscaled = true;
        }
        trace.record(TraceStep::Downscale, &[i], &[Some(before)], &[after]);
    }
}

fn check_len(instance: &RarpInstance, solution: &ScaleSolution) -> Result<(), SolveError> {
    if solution.scales.len() != instance.items.len() {
        return Err(SolveError::LengthMismatch {
            expected: instance.items.len(),
            got: solution.scales.len(),
        });
    }
    Ok(())
}

/// Intersects every anchored scaled box with the canvas.
pub fn trim(instance: &RarpInstance, solution: &ScaleSolution) -> Result<Vec<PackedBox>, SolveError> {
    check_len(instance, solution)?;
    let canvas = instance.canvas.as_box();
    Ok(instance
        .items
        .iter()
        .zip(&solution.scales)
        .enumerate()
        .map(|(i, (item, &s))| {
            let scaled = item.scaled_box(s);
            // Anchors lie inside the canvas, so the intersection is never empty
            // for validated instances; fall back to a clamped point otherwise.
            let rect = intersect(&scaled, &canvas).unwrap_or_else(|| {
                let p = item.anchor;
                AxisBox::new(
                    Point2::new(p.x.clamp(0.0, canvas.width), p.y.clamp(0.0, canvas.height)),
                    0.0,
                    0.0,
                )
            });
            PackedBox {
                item_id: i,
                rect,
                trimmed: rect != scaled,
            }
        })
        .collect())
}

pub fn objective(instance: &RarpInstance, solution: &ScaleSolution) -> Result<Objective, SolveError> {
    check_len(instance, solution)?;
    let (mut linear, mut covered_area) = (0.0, 0.0);
    for (item, &s) in instance.items.iter().zip(&solution.scales) {
        linear += s * item.base_area();
        covered_area += s * s * item.base_area();
    }
    Ok(Objective { linear, covered_area })
}

#[cfg(test)]
mod tests;
