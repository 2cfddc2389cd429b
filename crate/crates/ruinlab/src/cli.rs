//! Command-line driver: configuration, dispatch, and persistence.
//!
//! Every run writes its tables as CSV, its reports as JSON, and a manifest
//! echoing the full effective configuration (including the exponent
//! constants in play and their provenance). Output files carry a schema
//! version; the readers in this crate reject versions they do not know.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::absorption::absorption_row;
use crate::analysis::fit_power_law;
use crate::error::{Error, Result};
use crate::kernel::KernelOperator;
use crate::montecarlo::{estimate_face_probability, simulate_with, SimOptions};
use crate::profile::ProfileConstants;
use crate::simplex::{ChipConfig, SimplexIndex};
use crate::spectral::{
    cached_perron_frobenius, spectral_gap_scan, write_phi0_csv, PowerSettings,
};
use crate::sphereig::{
    derive_alpha, dirichlet_lambda, octant_triangle, tetrahedral_triangle, write_eigenfunction_csv,
};
use crate::verify::run_all;

/// Schema names accepted when reading CSV back in.
const KNOWN_CSV_SCHEMAS: [&str; 5] = [
    "ruinlab.phi0.v1",
    "ruinlab.absorption.v1",
    "ruinlab.mcstats.v1",
    "ruinlab.gapscan.v1",
    "ruinlab.fit-input.v1",
];

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Enumerate {
        k: usize,
        n: u64,
    },
    Eigen {
        k: usize,
        /// Single size ("24") or inclusive sweep ("12:48:4").
        n: String,
        tol: f64,
        cache: bool,
    },
    Absorb {
        k: usize,
        n: u64,
        start: Vec<u64>,
        tol: f64,
    },
    Simulate {
        k: usize,
        n: u64,
        start: Vec<u64>,
        runs: u64,
        seed: u64,
        chunk_size: u64,
        histogram: bool,
    },
    SphereEig {
        triangle: String,
        levels: u32,
    },
    Fit {
        input: PathBuf,
        xcol: usize,
        ycol: usize,
    },
    Verify {
        quick: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub constants_path: Option<PathBuf>,
}

#[derive(Serialize)]
struct ConstantsEcho {
    k: usize,
    beta: f64,
    lambda_k: f64,
    alpha_k: f64,
    provenance: String,
    note: Option<String>,
}

impl ConstantsEcho {
    fn from(c: &ProfileConstants) -> Self {
        Self {
            k: c.k,
            beta: c.beta,
            lambda_k: c.lambda_k,
            alpha_k: c.alpha_k,
            provenance: c.provenance.clone(),
            note: c.discrepancy_note(),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    constants: Option<ConstantsEcho>,
    outputs: Vec<String>,
    cache_hit: Option<bool>,
    wall_time_ms: u128,
}

/// Parse a comma-separated start state like "1,1,2".
pub fn parse_start(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| Error::Invalid(format!("bad chip count '{p}': {e}")))
        })
        .collect()
}

/// Parse "24" into a single size or "12:48:4" into an inclusive sweep.
pub fn parse_n_arg(text: &str) -> Result<Vec<u64>> {
    if let Some((rest, step)) = text.rsplit_once(':') {
        if let Some((lo, hi)) = rest.split_once(':') {
            let lo: u64 = lo.parse().map_err(|e| Error::Invalid(format!("bad N range '{text}': {e}")))?;
            let hi: u64 = hi.parse().map_err(|e| Error::Invalid(format!("bad N range '{text}': {e}")))?;
            let step: u64 = step.parse().map_err(|e| Error::Invalid(format!("bad N range '{text}': {e}")))?;
            if step == 0 || hi < lo {
                return Err(Error::Invalid(format!("bad N range '{text}'")));
            }
            return Ok((lo..=hi).step_by(step as usize).collect());
        }
        return Err(Error::Invalid(format!(
            "N range must be lo:hi:step, got '{text}'"
        )));
    }
    Ok(vec![text
        .parse()
        .map_err(|e| Error::Invalid(format!("bad N '{text}': {e}")))?])
}

fn effective_constants(cfg: &RunConfig, k: usize) -> Result<Option<ProfileConstants>> {
    if let Some(path) = &cfg.constants_path {
        let text = fs::read_to_string(path)?;
        let c = ProfileConstants::parse_key_value(&text)?;
        if c.k != k {
            return Err(Error::Invalid(format!(
                "constants file is for k={}, run uses k={k}",
                c.k
            )));
        }
        return Ok(Some(c));
    }
    Ok(ProfileConstants::default_for(k).ok())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

fn write_manifest(
    cfg: &RunConfig,
    command_name: &str,
    constants: Option<ConstantsEcho>,
    outputs: &[PathBuf],
    cache_hit: Option<bool>,
    t0: Instant,
) -> Result<PathBuf> {
    let manifest = Manifest {
        schema: "ruinlab.manifest.v1",
        config: cfg,
        constants,
        outputs: outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        cache_hit,
        wall_time_ms: t0.elapsed().as_millis(),
    };
    let body = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| Error::Format(format!("manifest serialization: {e}")))?;
    write_file(&cfg.out_dir, &format!("{command_name}.manifest.json"), &body)
}

fn start_tag(start: &[u64]) -> String {
    start
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

fn checked_start(k: usize, n: u64, start: &[u64]) -> Result<ChipConfig> {
    let s = ChipConfig::new(start.to_vec())?;
    if s.k() != k {
        return Err(Error::Invalid(format!(
            "start has {} players but --k is {k}",
            s.k()
        )));
    }
    if s.total() != n {
        return Err(Error::Invalid(format!(
            "start sums to {} but --n is {n}",
            s.total()
        )));
    }
    Ok(s)
}

fn cmd_enumerate(cfg: &RunConfig, k: usize, n: u64, t0: Instant) -> Result<i32> {
    let index = SimplexIndex::new(k, n)?;
    let mut interior = Vec::new();
    writeln!(interior, "# schema: ruinlab.enumeration.v1")?;
    let coords: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    writeln!(interior, "index,{}", coords.join(","))?;
    for (i, s) in index.interior_states().iter().enumerate() {
        let chips: Vec<String> = s.chips().iter().map(|c| c.to_string()).collect();
        writeln!(interior, "{i},{}", chips.join(","))?;
    }
    let mut boundary = Vec::new();
    writeln!(boundary, "# schema: ruinlab.enumeration.v1")?;
    writeln!(boundary, "index,{},ruined", coords.join(","))?;
    for (i, z) in index.boundary_states().iter().enumerate() {
        let chips: Vec<String> = z.chips().iter().map(|c| c.to_string()).collect();
        writeln!(
            boundary,
            "{i},{},{}",
            chips.join(","),
            z.ruined_player().expect("boundary state") + 1
        )?;
    }
    let out = vec![
        write_file(&cfg.out_dir, &format!("enumerate_k{k}_N{n}_interior.csv"), &interior)?,
        write_file(&cfg.out_dir, &format!("enumerate_k{k}_N{n}_boundary.csv"), &boundary)?,
    ];
    println!(
        "k={k} N={n}: {} interior states, {} reachable boundary states",
        index.interior_count(),
        index.boundary_count()
    );
    write_manifest(cfg, "enumerate", None, &out, None, t0)?;
    Ok(0)
}

fn cmd_eigen(cfg: &RunConfig, k: usize, n_arg: &str, tol: f64, cache: bool, t0: Instant) -> Result<i32> {
    let ns = parse_n_arg(n_arg)?;
    let settings = PowerSettings {
        tol,
        ..PowerSettings::default()
    };
    let cache_dir = cache.then(|| cfg.out_dir.join("cache"));
    let constants = effective_constants(cfg, k)?;
    let mut outputs = Vec::new();

    if ns.len() == 1 {
        let n = ns[0];
        let index = Arc::new(SimplexIndex::new(k, n)?);
        let op = KernelOperator::build(Arc::clone(&index));
        let (pair, hit) = cached_perron_frobenius(&op, &settings, cache_dir.as_deref())?;
        let mut csv = Vec::new();
        write_phi0_csv(&mut csv, &index, &pair)?;
        outputs.push(write_file(&cfg.out_dir, &format!("phi0_k{k}_N{n}.csv"), &csv)?);
        if let Some(d) = &cache_dir {
            outputs.push(d.join(crate::spectral::cache_file_name(k, n, tol)));
        }
        println!(
            "k={k} N={n}: beta0 = {:.12}, gap = {:.6e}, residual = {:.2e}, iterations = {}{}",
            pair.beta0,
            1.0 - pair.beta0,
            pair.residual,
            pair.iterations,
            if hit { " (cache hit)" } else { "" }
        );
        write_manifest(
            cfg,
            "eigen",
            constants.as_ref().map(ConstantsEcho::from),
            &outputs,
            Some(hit),
            t0,
        )?;
    } else {
        let scan = spectral_gap_scan(k, &ns, &settings, cache_dir.as_deref())?;
        let mut csv = Vec::new();
        writeln!(csv, "# schema: ruinlab.gapscan.v1")?;
        writeln!(csv, "N,gap,beta0,iterations,cache_hit")?;
        for g in &scan {
            writeln!(
                csv,
                "{},{:.17e},{:.17e},{},{}",
                g.n, g.gap, g.beta0, g.iterations, g.cache_hit
            )?;
        }
        outputs.push(write_file(&cfg.out_dir, &format!("gap_scan_k{k}.csv"), &csv)?);
        let points: Vec<(f64, f64)> = scan.iter().map(|g| (g.n as f64, g.gap)).collect();
        if points.len() >= 3 {
            let fit = fit_power_law(&points)?;
            println!(
                "k={k} sweep {:?}: fitted gap exponent {:.4} (r2 {:.6})",
                ns, fit.slope, fit.r_squared
            );
        }
        let all_hit = scan.iter().all(|g| g.cache_hit);
        write_manifest(
            cfg,
            "eigen",
            constants.as_ref().map(ConstantsEcho::from),
            &outputs,
            Some(all_hit),
            t0,
        )?;
    }
    Ok(0)
}

fn cmd_absorb(cfg: &RunConfig, k: usize, n: u64, start: &[u64], tol: f64, t0: Instant) -> Result<i32> {
    let s = checked_start(k, n, start)?;
    let index = Arc::new(SimplexIndex::new(k, n)?);
    let op = KernelOperator::build(Arc::clone(&index));
    let row = absorption_row(&op, &s, tol)?;

    let mut csv = Vec::new();
    row.write_csv(&mut csv)?;
    let tag = start_tag(start);
    let mut outputs = vec![write_file(
        &cfg.out_dir,
        &format!("absorption_k{k}_N{n}_{tag}.csv"),
        &csv,
    )?];

    #[derive(Serialize)]
    struct FaceAggregate {
        player: usize,
        probability: f64,
    }
    #[derive(Serialize)]
    struct Summary {
        schema: &'static str,
        start: Vec<u64>,
        total: f64,
        solver_residual: f64,
        iterations: u64,
        flushed: usize,
        faces: Vec<FaceAggregate>,
    }
    let faces: Vec<FaceAggregate> = (0..k)
        .map(|p| {
            Ok(FaceAggregate {
                player: p + 1,
                probability: row.face_hit_probability(p)?,
            })
        })
        .collect::<Result<_>>()?;
    for f in &faces {
        println!("P(player {} ruined | start {s}) = {:.12e}", f.player, f.probability);
    }
    println!("total boundary mass = {:.12} (residual {:.2e})", row.total(), row.solver_residual);
    let summary = Summary {
        schema: "ruinlab.absorption-summary.v1",
        start: start.to_vec(),
        total: row.total(),
        solver_residual: row.solver_residual,
        iterations: row.iterations,
        flushed: row.flushed,
        faces,
    };
    let body = serde_json::to_vec_pretty(&summary)
        .map_err(|e| Error::Format(format!("summary serialization: {e}")))?;
    outputs.push(write_file(
        &cfg.out_dir,
        &format!("absorption_summary_k{k}_N{n}_{tag}.json"),
        &body,
    )?);

    let constants = effective_constants(cfg, k)?;
    write_manifest(
        cfg,
        "absorb",
        constants.as_ref().map(ConstantsEcho::from),
        &outputs,
        None,
        t0,
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cfg: &RunConfig,
    k: usize,
    n: u64,
    start: &[u64],
    runs: u64,
    seed: u64,
    chunk_size: u64,
    histogram: bool,
    t0: Instant,
) -> Result<i32> {
    let s = checked_start(k, n, start)?;
    let options = SimOptions {
        chunk_size,
        histogram,
    };
    let stats = simulate_with(&s, runs, seed, &options)?;
    let mut csv = Vec::new();
    stats.write_csv(&mut csv)?;
    let tag = start_tag(start);
    let outputs = vec![write_file(
        &cfg.out_dir,
        &format!("mc_k{k}_N{n}_{tag}_seed{seed}.csv"),
        &csv,
    )?];
    for p in 0..k {
        let (est, se) = estimate_face_probability(&stats, p)?;
        println!("P(player {} ruined) ~ {est:.6} +- {se:.2e}", p + 1);
    }
    println!("mean absorption time ~ {:.3} games over {} runs", stats.mean_tau, stats.runs);
    let constants = effective_constants(cfg, k)?;
    write_manifest(
        cfg,
        "simulate",
        constants.as_ref().map(ConstantsEcho::from),
        &outputs,
        None,
        t0,
    )?;
    Ok(0)
}

fn cmd_sphere_eig(cfg: &RunConfig, triangle: &str, levels: u32, t0: Instant) -> Result<i32> {
    let (tri, known): (_, Option<f64>) = match triangle {
        "octant" => (octant_triangle(), Some(12.0)),
        "tetra" => (tetrahedral_triangle(), None),
        other => {
            return Err(Error::Invalid(format!(
                "unknown triangle '{other}' (expected 'octant' or 'tetra')"
            )))
        }
    };
    let (sol, mesh) = dirichlet_lambda(&tri, levels)?;

    let mut outputs = Vec::new();
    let mut mesh_txt = Vec::new();
    mesh.write_text(&mut mesh_txt)?;
    outputs.push(write_file(
        &cfg.out_dir,
        &format!("mesh_{triangle}_L{levels}.txt"),
        &mesh_txt,
    )?);
    let mut fun_csv = Vec::new();
    write_eigenfunction_csv(&mut fun_csv, &mesh, &sol)?;
    outputs.push(write_file(
        &cfg.out_dir,
        &format!("eigenfunction_{triangle}_L{levels}.csv"),
        &fun_csv,
    )?);

    for (level, lambda) in &sol.level_lambdas {
        println!("level {level}: lambda = {lambda:.8}");
    }
    println!("extrapolated lambda = {:.8}", sol.extrapolated_lambda);
    if let Some(target) = known {
        println!(
            "relative error against the known value {target}: {:.3e}",
            (sol.extrapolated_lambda - target).abs() / target
        );
    }

    let mut derived_alpha = None;
    let mut constants_echo = None;
    if triangle == "tetra" {
        let alpha = derive_alpha(&sol, 4)?;
        derived_alpha = Some(alpha);
        println!("derived alpha (k=4) = {alpha:.6}");
        let computed =
            ProfileConstants::from_lambda(4, sol.extrapolated_lambda, "computed-by-sphereig")?;
        let mut kv = Vec::new();
        computed.write_key_value(&mut kv)?;
        outputs.push(write_file(&cfg.out_dir, "constants_tetra.txt", &kv)?);
        constants_echo = Some(ConstantsEcho::from(&computed));
    }

    #[derive(Serialize)]
    struct Report {
        schema: &'static str,
        triangle: String,
        levels: u32,
        level_lambdas: Vec<(u32, f64)>,
        lambda: f64,
        extrapolated_lambda: f64,
        derived_alpha: Option<f64>,
    }
    let report = Report {
        schema: "ruinlab.sphere-eig.v1",
        triangle: triangle.to_string(),
        levels,
        level_lambdas: sol.level_lambdas.clone(),
        lambda: sol.lambda,
        extrapolated_lambda: sol.extrapolated_lambda,
        derived_alpha,
    };
    let body = serde_json::to_vec_pretty(&report)
        .map_err(|e| Error::Format(format!("report serialization: {e}")))?;
    outputs.push(write_file(
        &cfg.out_dir,
        &format!("sphere_eig_{triangle}.json"),
        &body,
    )?);

    write_manifest(cfg, "sphere-eig", constants_echo, &outputs, None, t0)?;
    Ok(0)
}

/// Read `(x, y)` points from a CSV file. Comment lines start with `#`; a
/// `# schema:` comment must name a schema this crate knows. A non-numeric
/// first row is treated as a header.
pub fn read_fit_points(path: &Path, xcol: usize, ycol: usize) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(schema) = comment.trim().strip_prefix("schema:") {
                let schema = schema.trim();
                if !KNOWN_CSV_SCHEMAS.contains(&schema) {
                    return Err(Error::Format(format!(
                        "{}: unknown schema '{schema}'",
                        path.display()
                    )));
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let need = xcol.max(ycol);
        if fields.len() <= need {
            return Err(Error::Format(format!(
                "{}:{}: need at least {} columns",
                path.display(),
                lineno + 1,
                need + 1
            )));
        }
        match (fields[xcol].trim().parse::<f64>(), fields[ycol].trim().parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            _ if points.is_empty() => continue, // header row
            _ => {
                return Err(Error::Format(format!(
                    "{}:{}: non-numeric data row",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(points)
}

fn cmd_fit(cfg: &RunConfig, input: &Path, xcol: usize, ycol: usize, t0: Instant) -> Result<i32> {
    let points = read_fit_points(input, xcol, ycol)?;
    let fit = fit_power_law(&points)?;
    println!(
        "power-law fit over {} points: exponent {:.6} +- {:.2e}, r2 {:.6}",
        fit.points_used, fit.slope, fit.stderr_slope, fit.r_squared
    );
    #[derive(Serialize)]
    struct FitReport {
        schema: &'static str,
        input: String,
        slope: f64,
        intercept: f64,
        r_squared: f64,
        stderr_slope: f64,
        points_used: usize,
    }
    let body = serde_json::to_vec_pretty(&FitReport {
        schema: "ruinlab.fit.v1",
        input: input.display().to_string(),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        stderr_slope: fit.stderr_slope,
        points_used: fit.points_used,
    })
    .map_err(|e| Error::Format(format!("fit serialization: {e}")))?;
    let outputs = vec![write_file(&cfg.out_dir, "fit.json", &body)?];
    write_manifest(cfg, "fit", None, &outputs, None, t0)?;
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, quick: bool, t0: Instant) -> Result<i32> {
    let results = run_all(quick)?;
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().all(|r| r.passed);
    #[derive(Serialize)]
    struct Report<'a> {
        schema: &'static str,
        quick: bool,
        passed: bool,
        failed: Vec<&'a str>,
        criteria: &'a [crate::verify::CriterionResult],
    }
    let report = Report {
        schema: "ruinlab.verify.v1",
        quick,
        passed,
        failed: results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name)
            .collect(),
        criteria: &results,
    };
    let body = serde_json::to_vec_pretty(&report)
        .map_err(|e| Error::Format(format!("report serialization: {e}")))?;
    let outputs = vec![write_file(&cfg.out_dir, "verify_report.json", &body)?];
    write_manifest(cfg, "verify", None, &outputs, None, t0)?;
    println!(
        "verification {}",
        if passed { "passed" } else { "FAILED" }
    );
    Ok(if passed { 0 } else { 3 })
}

/// Configure the global worker pool. The flag wins, then the
/// `RUINLAB_THREADS` variable, then the machine parallelism.
pub fn configure_threads(flag: Option<usize>) -> usize {
    let threads = flag
        .or_else(|| {
            std::env::var("RUINLAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    // Ignore failure: the pool can only be built once per process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    threads
}

/// Dispatch a validated configuration. Returns the process exit code.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    let t0 = Instant::now();
    match &cfg.command {
        Command::Enumerate { k, n } => cmd_enumerate(cfg, *k, *n, t0),
        Command::Eigen { k, n, tol, cache } => cmd_eigen(cfg, *k, n, *tol, *cache, t0),
        Command::Absorb { k, n, start, tol } => cmd_absorb(cfg, *k, *n, start, *tol, t0),
        Command::Simulate {
            k,
            n,
            start,
            runs,
            seed,
            chunk_size,
            histogram,
        } => cmd_simulate(cfg, *k, *n, start, *runs, *seed, *chunk_size, *histogram, t0),
        Command::SphereEig { triangle, levels } => cmd_sphere_eig(cfg, triangle, *levels, t0),
        Command::Fit { input, xcol, ycol } => cmd_fit(cfg, input, *xcol, *ycol, t0),
        Command::Verify { quick } => cmd_verify(cfg, *quick, t0),
    }
}
