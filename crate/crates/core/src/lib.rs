//! Resizable anchored region packing.
//!
//! Given a canvas, a set of fixed anchor points and fixed-aspect boxes
//! centered on them, find per-box scale factors that cover as much area as
//! possible while keeping the boxes interior-disjoint and inside the canvas.
//!
//! The crate is organized by stage:
//!
//! * [`geometry`] - axis-aligned boxes and the overlap classifier.
//! * [`instance`] - problem data, anchor sampling, validation and file I/O.
//! * [`solver`] - the pairwise greedy scaler, overlap repair, trimming.
//! * [`verifier`] - constraint checking, a grid-search oracle, and the
//!   collinear three-box residuals.
//! * [`shapes`] - Bézier blob shapes, mask rasterization and PPM output.
//! * [`generate`] and [`complexity`] - batch generation and timing harness
//!   shared by the CLI, benches and acceptance tests.

pub mod complexity;
pub mod generate;
pub mod geometry;
pub mod instance;
pub mod numfmt;
pub mod shapes;
pub mod solver;
pub mod verifier;

pub use geometry::{classify_overlap, interiors_disjoint, intersect, AxisBox, Overlap, OverlapClass, Point2};
pub use instance::{
    validate_instance, CanvasSpec, InstanceError, ItemSpec, RarpInstance, SeparationSpec, Violation,
};
pub use solver::{
    greedy_solve, objective, pair_scale, trim, Objective, PackedBox, ScaleFlags, ScaleSolution, SolveError,
    SolveOptions, SolveTrace,
};
pub use verifier::{oracle_max, verify, OracleResult, VerificationReport};

use std::io::Write;
use std::path::Path;

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// SplitMix64 step; derives independent per-item and per-instance seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
