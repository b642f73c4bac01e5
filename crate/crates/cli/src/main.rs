mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::{MaskFormat, RunConfig};
use rarp_core::generate::CanvasMode;
use std::path::PathBuf;
use std::process::ExitCode;

/// Resizable anchored region packing: generate, solve, verify, render.
#[derive(Debug, Parser)]
#[command(name = "rarp", version)]
struct Cli {
    #[command(flatten)]
    common: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a batch of random instances (plus item shapes) to --out.
    Gen,
    /// Solve instance files; writes `<stem>.solution.json` to --out.
    Solve {
        /// Instance file or directory of instance files.
        #[arg(long)]
        input: PathBuf,
    },
    /// Check solutions; writes `<stem>.report.json`, exits 1 on any violation.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Directory holding `<stem>.solution.json` (default: --out).
        #[arg(long)]
        solutions: Option<PathBuf>,
    },
    /// Render solutions as class-indexed PPM masks.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solutions: Option<PathBuf>,
    },
    /// Compare the heuristic with the grid-search oracle (at most 4 items).
    Oracle {
        #[arg(long)]
        input: PathBuf,
    },
    /// Time the solver over growing n and fit the log-log slope.
    Bench,
}

/// Flags named after the config keys they override.
#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    batch: Option<usize>,
    #[arg(long, global = true)]
    n_min: Option<usize>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true)]
    canvas_width: Option<f64>,
    #[arg(long, global = true)]
    canvas_height: Option<f64>,
    #[arg(long, global = true, value_enum)]
    canvas_mode: Option<CanvasModeArg>,
    #[arg(long, global = true)]
    max_aspect: Option<f64>,
    #[arg(long, global = true)]
    sep_abs: Option<f64>,
    #[arg(long, global = true)]
    sep_pct: Option<f64>,
    #[arg(long, global = true)]
    margin_frac: Option<f64>,
    #[arg(long, global = true)]
    size_min_frac: Option<f64>,
    #[arg(long, global = true)]
    size_max_frac: Option<f64>,
    #[arg(long, global = true)]
    n_control: Option<usize>,
    #[arg(long, global = true)]
    irregularity: Option<f64>,
    #[arg(long, global = true)]
    downscale: Option<bool>,
    #[arg(long, global = true)]
    downscale_min: Option<f64>,
    #[arg(long, global = true)]
    downscale_max: Option<f64>,
    #[arg(long, global = true)]
    pass_cap: Option<usize>,
    #[arg(long, global = true)]
    allow_trim: Option<bool>,
    #[arg(long, global = true)]
    palette: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mask_format: Option<MaskFormat>,
    #[arg(long, global = true)]
    oracle_resolution: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    bench_sizes: Option<Vec<usize>>,
    #[arg(long, global = true)]
    bench_repeats: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CanvasModeArg {
    Fixed,
    Aspect,
    Snug,
    Mixed,
}

impl From<CanvasModeArg> for CanvasMode {
    fn from(m: CanvasModeArg) -> Self {
        match m {
            CanvasModeArg::Fixed => CanvasMode::Fixed,
            CanvasModeArg::Aspect => CanvasMode::Aspect,
            CanvasModeArg::Snug => CanvasMode::Snug,
            CanvasModeArg::Mixed => CanvasMode::Mixed,
        }
    }
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig, String> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v.into(); } )* };
        }
        set!(
            seed, out, jobs, batch, n_min, n_max, canvas_width, canvas_height, canvas_mode, max_aspect, sep_abs,
            sep_pct, margin_frac, size_min_frac, size_max_frac, n_control, irregularity, downscale, downscale_min,
            downscale_max, allow_trim, mask_format, oracle_resolution, bench_sizes, bench_repeats
        );
        if let Some(v) = self.pass_cap {
            c.pass_cap = Some(v);
        }
        if let Some(v) = self.palette {
            c.palette = Some(v);
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.common.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_INVALID);
        }
    };
    if config.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_INVALID);
        }
    }
    let code = match cli.command {
        Command::Gen => commands::gen(&config),
        Command::Solve { input } => commands::solve(&config, &input),
        Command::Verify { input, solutions } => commands::verify(&config, &input, solutions.as_deref()),
        Command::Render { input, solutions } => commands::render(&config, &input, solutions.as_deref()),
        Command::Oracle { input } => commands::oracle(&config, &input),
        Command::Bench => commands::bench(&config),
    };
    ExitCode::from(code)
}
