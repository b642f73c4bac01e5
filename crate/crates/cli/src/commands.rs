use crate::config::{MaskFormat, RunConfig};
use rarp_core::complexity::{loglog_slope, run_bench, BenchRecord};
use rarp_core::generate::{batch_seed, generate_instance};
use rarp_core::instance::{read_instance, read_instance_unchecked, to_json, RarpInstance};
use rarp_core::shapes::{class_indices, gen_bezier_blob, rasterize, write_mask, BlobShape, Palette, PpmFormat};
use rarp_core::solver::{greedy_solve, objective, read_solution, trim, write_solution, SolutionFile};
use rarp_core::verifier::{oracle_max, report_to_json, verify as verify_solution};
use rarp_core::{mix_seed, write_atomic};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

const DERIVED_SUFFIXES: [&str; 3] = [".solution.json", ".shapes.json", ".report.json"];

fn instance_files(input: &Path) -> Result<Vec<PathBuf>, String> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let entries = std::fs::read_dir(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && !DERIVED_SUFFIXES.iter().any(|s| name.ends_with(s))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("{}: no instance files", input.display()));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("instance");
    name.strip_suffix(".json").unwrap_or(name).to_string()
}

/// Per-file seed derived from the run seed and the file stem (FNV-1a), so
/// results do not depend on which other files are in the batch.
fn stem_seed(seed: u64, stem: &str) -> u64 {
    let h = stem
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    mix_seed(seed, h)
}

fn prepare_out(config: &RunConfig) -> Result<(), String> {
    std::fs::create_dir_all(&config.out).map_err(|e| format!("{}: {e}", config.out.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    s.push('\n');
    write_atomic(path, s.as_bytes()).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs `f` over the inputs in parallel and reports per-file errors in
/// input order. Returns the worst exit code.
fn for_each_file<F>(files: &[PathBuf], f: F) -> u8
where
    F: Fn(&Path) -> Result<u8, (u8, String)> + Sync,
{
    let results: Vec<Result<u8, (u8, String)>> = files.par_iter().map(|p| f(p)).collect();
    let mut code = EXIT_OK;
    for (path, r) in files.iter().zip(results) {
        match r {
            Ok(c) => code = code.max(c),
            Err((c, msg)) => {
                eprintln!("{}: {msg}", path.display());
                code = code.max(c);
            }
        }
    }
    code
}

fn invalid<E: std::fmt::Display>(e: E) -> (u8, String) {
    (EXIT_INVALID, e.to_string())
}

pub fn gen(config: &RunConfig) -> u8 {
    let gc = config.gen_config();
    if let Err(e) = gc.validate() {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if let Err(e) = prepare_out(config) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    let results: Vec<Result<(), String>> = (0..config.batch)
        .into_par_iter()
        .map(|k| {
            let g = generate_instance(&gc, batch_seed(config.seed, k)).map_err(|e| e.to_string())?;
            let base = config.out.join(format!("instance_{k:04}"));
            write_atomic(&base.with_extension("json"), to_json(&g.instance).as_bytes()).map_err(|e| e.to_string())?;
            write_json(&config.out.join(format!("instance_{k:04}.shapes.json")), &g.shapes)
        })
        .collect();
    let mut code = EXIT_OK;
    for (k, r) in results.into_iter().enumerate() {
        if let Err(e) = r {
            eprintln!("instance {k}: {e}");
            code = EXIT_INVALID;
        }
    }
    if code == EXIT_OK {
        println!("wrote {} instances to {}", config.batch, config.out.display());
    }
    code
}

pub fn solve(config: &RunConfig, input: &Path) -> u8 {
    let files = match instance_files(input).and_then(|f| prepare_out(config).map(|_| f)) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    for_each_file(&files, |path| {
        let s = stem(path);
        let instance = read_instance(path).map_err(invalid)?;
        let options = config.solve_options(stem_seed(config.seed, &s));
        let (solution, trace) = greedy_solve(&instance, &options).map_err(invalid)?;
        let packed = trim(&instance, &solution).map_err(invalid)?;
        let obj = objective(&instance, &solution).map_err(invalid)?;
        let file = SolutionFile::new(&solution, &packed, obj);
        write_solution(&file, &config.out.join(format!("{s}.solution.json"))).map_err(invalid)?;
        println!("{s}: n={} passes={} linear={:.6}", instance.len(), trace.passes, obj.linear);
        Ok(EXIT_OK)
    })
}

fn load_pair(path: &Path, solutions: &Path) -> Result<(String, RarpInstance, SolutionFile), (u8, String)> {
    let s = stem(path);
    let instance = read_instance_unchecked(path).map_err(invalid)?;
    let solution = read_solution(&solutions.join(format!("{s}.solution.json"))).map_err(invalid)?;
    Ok((s, instance, solution))
}

pub fn verify(config: &RunConfig, input: &Path, solutions: Option<&Path>) -> u8 {
    let solutions = solutions.unwrap_or(&config.out);
    let files = match instance_files(input).and_then(|f| prepare_out(config).map(|_| f)) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    for_each_file(&files, |path| {
        let (s, instance, file) = load_pair(path, solutions)?;
        let report = verify_solution(&instance, &file.solution(), &file.packed_boxes(), config.allow_trim);
        let out = config.out.join(format!("{s}.report.json"));
        write_atomic(&out, report_to_json(&report).as_bytes()).map_err(invalid)?;
        if report.pass {
            println!("{s}: pass");
            Ok(EXIT_OK)
        } else {
            println!("{s}: FAIL ({} violations)", report.violation_count());
            Ok(EXIT_VERIFY)
        }
    })
}

fn shapes_for(config: &RunConfig, path: &Path, s: &str, n: usize) -> Result<Vec<BlobShape>, (u8, String)> {
    let sidecar = path.with_file_name(format!("{s}.shapes.json"));
    if sidecar.exists() {
        let text = std::fs::read_to_string(&sidecar).map_err(invalid)?;
        let shapes: Vec<BlobShape> = serde_json::from_str(&text).map_err(invalid)?;
        if shapes.len() != n {
            return Err(invalid(format!("{} has {} shapes for {n} items", sidecar.display(), shapes.len())));
        }
        return Ok(shapes);
    }
    let seed = stem_seed(config.seed, s);
    (0..n)
        .map(|i| gen_bezier_blob(mix_seed(seed, i as u64), config.n_control, config.irregularity).map_err(invalid))
        .collect()
}

pub fn render(config: &RunConfig, input: &Path, solutions: Option<&Path>) -> u8 {
    let solutions = solutions.unwrap_or(&config.out);
    let palette = match &config.palette {
        Some(p) => match Palette::load(p) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_INVALID;
            }
        },
        None => Palette::default(),
    };
    let format = match config.mask_format {
        MaskFormat::P3 => PpmFormat::P3,
        MaskFormat::P6 => PpmFormat::P6,
    };
    let files = match instance_files(input).and_then(|f| prepare_out(config).map(|_| f)) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    for_each_file(&files, |path| {
        let (s, instance, file) = load_pair(path, solutions)?;
        let shapes = shapes_for(config, path, &s, instance.len())?;
        let packed = file.packed_boxes();
        let mask = rasterize(&instance.canvas, &packed, &shapes, &class_indices(&instance.items, &palette))
            .map_err(invalid)?;
        write_mask(&mask, &palette, &config.out.join(format!("{s}.ppm")), format).map_err(invalid)?;
        println!("{s}: {}x{}", mask.width, mask.height);
        Ok(EXIT_OK)
    })
}

#[derive(Debug, Serialize)]
struct OracleRow {
    instance: String,
    n: usize,
    heuristic: f64,
    oracle: f64,
    relative_gap: f64,
    heuristic_protrudes: bool,
    oracle_scales: Vec<f64>,
    grid_resolution: f64,
    evaluations: u64,
}

pub fn oracle(config: &RunConfig, input: &Path) -> u8 {
    let files = match instance_files(input).and_then(|f| prepare_out(config).map(|_| f)) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let rows: Vec<Result<OracleRow, String>> = files
        .iter()
        .map(|path| {
            let s = stem(path);
            let instance = read_instance(path).map_err(|e| e.to_string())?;
            let (solution, _) = greedy_solve(&instance, &config.solve_options(stem_seed(config.seed, &s)))
                .map_err(|e| e.to_string())?;
            let heuristic = objective(&instance, &solution).map_err(|e| e.to_string())?.linear;
            let canvas = instance.canvas.as_box();
            let protrudes = instance
                .items
                .iter()
                .zip(&solution.scales)
                .any(|(it, &a)| !canvas.contains_box(&it.scaled_box(a)));
            let upper = instance
                .items
                .iter()
                .map(|it| it.boundary_fit(&instance.canvas))
                .fold(0.0, f64::max);
            let resolution = config.oracle_resolution * upper;
            let o = oracle_max(&instance, resolution, upper).map_err(|e| e.to_string())?;
            Ok(OracleRow {
                instance: s,
                n: instance.len(),
                heuristic,
                oracle: o.best_objective,
                relative_gap: if o.best_objective > 0.0 {
                    (o.best_objective - heuristic) / o.best_objective
                } else {
                    0.0
                },
                heuristic_protrudes: protrudes,
                oracle_scales: o.best_scales,
                grid_resolution: o.grid_resolution,
                evaluations: o.evaluations,
            })
        })
        .collect();
    let mut code = EXIT_OK;
    let mut ok_rows = Vec::new();
    println!("{:<24} {:>2} {:>14} {:>14} {:>9}", "instance", "n", "heuristic", "oracle", "gap");
    for (path, r) in files.iter().zip(rows) {
        match r {
            Ok(row) => {
                println!(
                    "{:<24} {:>2} {:>14.4} {:>14.4} {:>9.4}{}",
                    row.instance,
                    row.n,
                    row.heuristic,
                    row.oracle,
                    row.relative_gap,
                    if row.heuristic_protrudes { "  (protrudes)" } else { "" }
                );
                ok_rows.push(row);
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                code = EXIT_INVALID;
            }
        }
    }
    if let Err(e) = write_json(&config.out.join("oracle.json"), &ok_rows) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    code
}

#[derive(Debug, Serialize)]
struct BenchSummary {
    records: Vec<BenchRecord>,
    slope: f64,
}

pub fn bench(config: &RunConfig) -> u8 {
    if config.bench_sizes.len() < 2 {
        eprintln!("error: need at least two bench sizes");
        return EXIT_INVALID;
    }
    if let Err(e) = prepare_out(config) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    let records = match run_bench(&config.bench_sizes, config.seed, config.bench_repeats) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    for r in &records {
        println!("n={:<6} time={:.6}s passes={}", r.n, r.wall_time, r.passes);
    }
    let slope = loglog_slope(&records);
    println!("log-log slope: {slope:.3}");
    match write_json(&config.out.join("bench.json"), &BenchSummary { records, slope }) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_and_seeds() {
        assert_eq!(stem(Path::new("a/instance_0001.json")), "instance_0001");
        assert_eq!(stem_seed(1, "x"), stem_seed(1, "x"));
        assert_ne!(stem_seed(1, "x"), stem_seed(1, "y"));
        assert_ne!(stem_seed(1, "x"), stem_seed(2, "x"));
    }
}
