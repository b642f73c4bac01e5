//! Timing harness for the solver's scaling in `n`.

use crate::geometry::Point2;
use crate::instance::{CanvasSpec, InstanceError, ItemSpec, RarpInstance, SeparationSpec};
use crate::mix_seed;
use crate::solver::{greedy_solve, SolveError, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const BENCH_SIZES: [usize; 6] = [100, 200, 400, 800, 1600, 3200];
pub const BENCH_SEPARATION: f64 = 1.0;
pub const BENCH_SPACING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    /// Seconds; the minimum over repeats.
    pub wall_time: f64,
    pub passes: usize,
}

/// Anchors on a jittered lattice with fixed per-axis separation: anchor `k`
/// takes x-slot `k` and the y-slot that walks up column `k / m` of an
/// `m x m` grid (`m = ceil(sqrt(n))`), so x-sorted neighbors sit one row
/// apart. Item sizes are drawn so nearby boxes collide and the repair pass
/// has work to do.
///
/// Uniformly random anchors are not used: neighbors along the sort axis are
/// then typically far apart on the other axis, pair scales blow up, and the
/// common-factor repair drives some scales under the minimum scale once
/// `n` reaches the high hundreds.
pub fn bench_instance(n: usize, seed: u64) -> Result<RarpInstance, InstanceError> {
    let m = (n.max(1) as f64).sqrt().ceil() as usize;
    let side = BENCH_SPACING * (m * m + 1) as f64;
    let canvas = CanvasSpec::new(side, side);
    let sep = SeparationSpec::new(BENCH_SEPARATION, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 1));
    let jitter = (BENCH_SPACING - BENCH_SEPARATION) / 4.0;
    let row = BENCH_SPACING * m as f64;
    let items = (0..n)
        .map(|k| {
            let slot_y = (k % m) * m + k / m;
            let x = BENCH_SPACING * (k + 1) as f64 + rng.gen_range(-jitter..jitter);
            let y = BENCH_SPACING * (slot_y + 1) as f64 + rng.gen_range(-jitter..jitter);
            ItemSpec::new(
                k,
                "bench",
                rng.gen_range(0.4..1.2) * row,
                rng.gen_range(0.4..1.2) * row,
                Point2::new(x, y),
            )
        })
        .collect();
    Ok(RarpInstance::new(canvas, sep, items))
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

pub fn time_solve(instance: &RarpInstance, options: &SolveOptions, repeats: usize) -> Result<BenchRecord, SolveError> {
    let mut best = f64::INFINITY;
    let mut passes = 0;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let (_, trace) = greedy_solve(instance, options)?;
        best = best.min(start.elapsed().as_secs_f64());
        passes = trace.passes;
    }
    Ok(BenchRecord {
        n: instance.len(),
        wall_time: best.max(f64::MIN_POSITIVE),
        passes,
    })
}

pub fn run_bench(sizes: &[usize], seed: u64, repeats: usize) -> Result<Vec<BenchRecord>, BenchError> {
    let options = SolveOptions::default();
    sizes
        .iter()
        .map(|&n| {
            let inst = bench_instance(n, mix_seed(seed, n as u64))?;
            Ok(time_solve(&inst, &options, repeats)?)
        })
        .collect()
}

/// Least-squares slope of `ln(wall_time)` against `ln(n)`.
pub fn loglog_slope(records: &[BenchRecord]) -> f64 {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.n as f64).ln(), r.wall_time.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
