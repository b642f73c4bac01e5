//! Random instance generation for batches, acceptance runs and the CLI.
//!
//! Each item gets a blob shape; its base box is the blob's bounding box
//! scaled to a random fraction of the canvas. Canvases are either fixed,
//! drawn with a random aspect ratio, or snug boxes around a rasterized
//! object mask.

use crate::geometry::Point2;
use crate::instance::{
    sample_anchors, snug_canvas_from_mask, BoolMask, CanvasSpec, InstanceError, ItemSpec, RarpInstance,
    SeparationSpec, DEFAULT_MARGIN_FRAC,
};
use crate::mix_seed;
use crate::shapes::{gen_bezier_blob, rasterize, shape_bbox, BlobShape, Palette};
use crate::solver::PackedBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanvasMode {
    /// Always `canvas_width x canvas_height`.
    Fixed,
    /// Random aspect ratio in `[1/max_aspect, max_aspect]` at the configured area.
    Aspect,
    /// Snug bounding box of a blob object inside a random-aspect image.
    Snug,
    /// One third each of fixed, aspect and snug.
    #[default]
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub canvas_width: f64,
    pub canvas_height: f64,
    pub canvas_mode: CanvasMode,
    pub max_aspect: f64,
    pub sep_abs: f64,
    pub sep_pct: f64,
    pub margin_frac: f64,
    /// Longer side of an item's base box as a fraction of the shorter
    /// canvas side.
    pub size_min_frac: f64,
    pub size_max_frac: f64,
    pub n_control: usize,
    pub irregularity: f64,
    /// Item class labels; empty means the non-background default palette
    /// labels.
    pub classes: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_min: 5,
            n_max: 14,
            canvas_width: 512.0,
            canvas_height: 512.0,
            canvas_mode: CanvasMode::Mixed,
            max_aspect: 2.0,
            sep_abs: 4.0,
            sep_pct: 0.0,
            margin_frac: DEFAULT_MARGIN_FRAC,
            size_min_frac: 0.05,
            size_max_frac: 0.3,
            n_control: 12,
            irregularity: 0.6,
            classes: Vec::new(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::InvalidParameter(m));
        if self.n_min > self.n_max {
            return bad(format!("n range [{}, {}] is empty", self.n_min, self.n_max));
        }
        if !(self.canvas_width > 0.0 && self.canvas_height > 0.0)
            || !self.canvas_width.is_finite()
            || !self.canvas_height.is_finite()
        {
            return bad(format!("canvas {} x {}", self.canvas_width, self.canvas_height));
        }
        if !(self.max_aspect >= 1.0 && self.max_aspect.is_finite()) {
            return bad(format!("max_aspect {}", self.max_aspect));
        }
        if !(0.0 < self.size_min_frac && self.size_min_frac <= self.size_max_frac && self.size_max_frac <= 1.0) {
            return bad(format!("size fractions [{}, {}]", self.size_min_frac, self.size_max_frac));
        }
        if self.n_control < 4 || !(0.0..=1.0).contains(&self.irregularity) {
            return bad(format!("shape parameters n_control {} irregularity {}", self.n_control, self.irregularity));
        }
        // The smallest canvas any mode can produce must still admit the separation.
        let smallest = self.canvas_width.min(self.canvas_height) / self.max_aspect.sqrt() * 0.5;
        let probe = CanvasSpec::new(smallest, smallest);
        let sep = SeparationSpec::new(self.sep_abs, self.sep_pct);
        if !sep.is_valid_for(&CanvasSpec::new(self.canvas_width, self.canvas_height)) || !sep.is_valid_for(&probe) {
            return bad(format!("separation {sep:?} does not fit the canvas"));
        }
        Ok(())
    }

    fn labels(&self) -> Vec<String> {
        if self.classes.is_empty() {
            Palette::default().entries.keys().skip(1).cloned().collect()
        } else {
            self.classes.clone()
        }
    }
}

/// An instance together with the shape of every item.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: RarpInstance,
    pub shapes: Vec<BlobShape>,
    /// The mode actually used; never `Mixed`.
    pub canvas_mode: CanvasMode,
}

fn aspect_canvas(config: &GenConfig, rng: &mut ChaCha8Rng) -> CanvasSpec {
    let area = config.canvas_width * config.canvas_height;
    let log_max = config.max_aspect.ln();
    let aspect = if log_max > 0.0 {
        rng.gen_range(-log_max..=log_max).exp()
    } else {
        1.0
    };
    let w = (area * aspect).sqrt().round().max(1.0);
    let h = (area / aspect).sqrt().round().max(1.0);
    CanvasSpec::new(w, h)
}

/// Rasterizes an object blob covering 60-90% of a random-aspect image and
/// returns the snug box around it.
fn snug_canvas(config: &GenConfig, rng: &mut ChaCha8Rng, seed: u64) -> Result<CanvasSpec, InstanceError> {
    let image = aspect_canvas(config, rng);
    let fx = rng.gen_range(0.6..0.9);
    let fy = rng.gen_range(0.6..0.9);
    let (w, h) = (image.width * fx, image.height * fy);
    let cx = rng.gen_range(w / 2.0..=image.width - w / 2.0);
    let cy = rng.gen_range(h / 2.0..=image.height - h / 2.0);
    let object = gen_bezier_blob(seed, config.n_control, config.irregularity)
        .map_err(|e| InstanceError::InvalidParameter(e.to_string()))?;
    let rect = crate::geometry::AxisBox::new(Point2::new(cx, cy), w, h);
    let mask = rasterize(
        &image,
        &[PackedBox {
            item_id: 0,
            rect,
            trimmed: false,
        }],
        &[object],
        &[1],
    )
    .map_err(|e| InstanceError::InvalidParameter(e.to_string()))?;
    let cells = mask.cells.iter().map(|&c| c != 0).collect();
    let bool_mask = BoolMask::from_cells(mask.width, mask.height, cells)?;
    Ok(snug_canvas_from_mask(&bool_mask)?.canvas)
}

/// Deterministic instance for `seed`.
pub fn generate_instance(config: &GenConfig, seed: u64) -> Result<GeneratedInstance, InstanceError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0));
    let mode = match config.canvas_mode {
        CanvasMode::Mixed => [CanvasMode::Fixed, CanvasMode::Aspect, CanvasMode::Snug][rng.gen_range(0..3)],
        m => m,
    };
    let canvas = match mode {
        CanvasMode::Fixed | CanvasMode::Mixed => CanvasSpec::new(config.canvas_width, config.canvas_height),
        CanvasMode::Aspect => aspect_canvas(config, &mut rng),
        CanvasMode::Snug => snug_canvas(config, &mut rng, mix_seed(seed, 1))?,
    };
    let n = rng.gen_range(config.n_min..=config.n_max);
    let separation = SeparationSpec::new(config.sep_abs, config.sep_pct);
    let anchors = sample_anchors(canvas, n, separation, config.margin_frac, mix_seed(seed, 2))?;
    let labels = config.labels();
    let short_side = canvas.width.min(canvas.height);
    let mut items = Vec::with_capacity(n);
    let mut shapes = Vec::with_capacity(n);
    for (i, anchor) in anchors.into_iter().enumerate() {
        let shape = gen_bezier_blob(mix_seed(seed, 1000 + i as u64), config.n_control, config.irregularity)
            .map_err(|e| InstanceError::InvalidParameter(e.to_string()))?;
        let (bw, bh) = shape_bbox(&shape);
        let size = rng.gen_range(config.size_min_frac..=config.size_max_frac) * short_side;
        let k = size / bw.max(bh);
        let label = labels[rng.gen_range(0..labels.len())].clone();
        items.push(ItemSpec::new(i, label, bw * k, bh * k, anchor));
        shapes.push(shape);
    }
    Ok(GeneratedInstance {
        instance: RarpInstance::new(canvas, separation, items),
        shapes,
        canvas_mode: mode,
    })
}

/// Seed of the `index`-th instance in a batch.
pub fn batch_seed(seed: u64, index: usize) -> u64 {
    mix_seed(seed, 1 << 32 | index as u64)
}
