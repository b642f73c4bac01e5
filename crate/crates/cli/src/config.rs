use rarp_core::generate::{CanvasMode, GenConfig};
use rarp_core::solver::SolveOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MaskFormat {
    #[default]
    P3,
    P6,
}

/// Every knob of a run. A JSON file supplies any subset of these keys;
/// command-line flags with the same names override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub batch: usize,

    pub n_min: usize,
    pub n_max: usize,
    pub canvas_width: f64,
    pub canvas_height: f64,
    pub canvas_mode: CanvasMode,
    pub max_aspect: f64,
    pub sep_abs: f64,
    pub sep_pct: f64,
    pub margin_frac: f64,
    pub size_min_frac: f64,
    pub size_max_frac: f64,
    pub n_control: usize,
    pub irregularity: f64,
    pub classes: Vec<String>,

    pub downscale: bool,
    pub downscale_min: f64,
    pub downscale_max: f64,
    pub pass_cap: Option<usize>,
    pub allow_trim: bool,

    pub palette: Option<PathBuf>,
    pub mask_format: MaskFormat,

    /// Oracle grid step as a fraction of the largest boundary-fit scale.
    pub oracle_resolution: f64,

    pub bench_sizes: Vec<usize>,
    pub bench_repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GenConfig::default();
        let s = SolveOptions::default();
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            jobs: 0,
            batch: 1,
            n_min: g.n_min,
            n_max: g.n_max,
            canvas_width: g.canvas_width,
            canvas_height: g.canvas_height,
            canvas_mode: g.canvas_mode,
            max_aspect: g.max_aspect,
            sep_abs: g.sep_abs,
            sep_pct: g.sep_pct,
            margin_frac: g.margin_frac,
            size_min_frac: g.size_min_frac,
            size_max_frac: g.size_max_frac,
            n_control: g.n_control,
            irregularity: g.irregularity,
            classes: g.classes,
            downscale: s.enable_random_downscale,
            downscale_min: s.downscale_range.0,
            downscale_max: s.downscale_range.1,
            pass_cap: s.post_process_pass_cap,
            allow_trim: true,
            palette: None,
            mask_format: MaskFormat::P3,
            oracle_resolution: 1e-3,
            bench_sizes: rarp_core::complexity::BENCH_SIZES.to_vec(),
            bench_repeats: 3,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            n_min: self.n_min,
            n_max: self.n_max,
            canvas_width: self.canvas_width,
            canvas_height: self.canvas_height,
            canvas_mode: self.canvas_mode,
            max_aspect: self.max_aspect,
            sep_abs: self.sep_abs,
            sep_pct: self.sep_pct,
            margin_frac: self.margin_frac,
            size_min_frac: self.size_min_frac,
            size_max_frac: self.size_max_frac,
            n_control: self.n_control,
            irregularity: self.irregularity,
            classes: self.classes.clone(),
        }
    }

    pub fn solve_options(&self, seed: u64) -> SolveOptions {
        SolveOptions {
            enable_random_downscale: self.downscale,
            downscale_range: (self.downscale_min, self.downscale_max),
            seed,
            post_process_pass_cap: self.pass_cap,
            ..SolveOptions::default()
        }
    }
}
