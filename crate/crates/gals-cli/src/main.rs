//! `gals` — benchmark harness for the gradient-augmented level set toolkit.
//!
//! Subcommands:
//! - `run <benchmark>`: run one benchmark and emit artifacts.
//! - `converge <benchmark>`: run a grid ladder and fit convergence slopes.
//! - `stability-scan`: tabulate the 1D growth-matrix spectrum.
//! - `extract <state-file>`: contour a stored level set state.
//!
//! Every flag can also be given in a plain-text config file (`--config`),
//! one `key=value` per line with the same keys as the flags; command-line
//! flags take precedence.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gals::bench::{convergence_study, run_benchmark, BenchmarkId, RunConfig, SchemeId};
use gals::geometry::{extract_contour, measure_volume, SurfaceMesh};
use gals::io::{self, StoredState};
use gals::stability::spectral_scan;
use gals::{CrossScheme, GalsError, Result};

#[derive(Parser)]
#[command(name = "gals", version, about = "Gradient-augmented level set benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one benchmark with the selected scheme.
    Run {
        /// Benchmark id: pseudo-1d, vortex, swirl, zalesak, zalesak-sphere,
        /// sphere, cube, curvature.
        benchmark: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a resolution ladder and report fitted convergence slopes.
    Converge {
        /// Benchmark id: pseudo-1d, vortex, curvature.
        benchmark: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Tabulate the eigenvalues of the 1D constant-coefficient growth
    /// matrix over a (xi, theta) grid.
    StabilityScan {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Extract the contour of a stored level set state.
    Extract {
        /// Path to a state file written by a benchmark run.
        state_file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Args, Default)]
struct CommonOpts {
    /// Cells per axis (benchmark default if omitted).
    #[arg(long)]
    grid: Option<usize>,
    /// Scheme: gals-rk3, gals-heun, gals-euler, weno, weno-reinit.
    #[arg(long)]
    scheme: Option<String>,
    /// Cross-derivative reconstruction: cell or central.
    #[arg(long)]
    cross: Option<String>,
    /// Time step: a number, or "default" for the benchmark's rule.
    #[arg(long)]
    dt: Option<String>,
    /// Output directory for CSV/mesh artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Contour/volume sampling refinement per cell edge.
    #[arg(long)]
    refine: Option<usize>,
    /// Seed for randomized sample-point generation.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated grid ladder for `converge`.
    #[arg(long)]
    resolutions: Option<String>,
    /// Plain-text key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| GalsError::Parse {
            context: format!("{}:{}", path.display(), lineno + 1),
            message: format!("expected key=value, got: {line}"),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_cross(s: &str) -> Result<CrossScheme> {
    match s {
        "cell" => Ok(CrossScheme::CellBased),
        "central" => Ok(CrossScheme::CentralDifference),
        other => Err(GalsError::InvalidConfig(format!(
            "unknown cross scheme: {other} (expected cell or central)"
        ))),
    }
}

fn parse_dt(s: &str) -> Result<Option<f64>> {
    if s == "default" {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|e| GalsError::Parse {
        context: "dt".into(),
        message: e.to_string(),
    })
}

fn parse_resolutions(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|e| GalsError::Parse {
                context: "resolutions".into(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Merge the config file (if any) under the flags and build a RunConfig.
fn build_config(benchmark: BenchmarkId, opts: &CommonOpts) -> Result<RunConfig> {
    let file = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file.get(key).cloned())
    };

    let mut cfg = RunConfig::new(benchmark);
    if let Some(s) = pick(&opts.scheme, "scheme") {
        cfg.scheme = s.parse::<SchemeId>()?;
    }
    if let Some(s) = pick(&opts.cross, "cross") {
        cfg.cross = parse_cross(&s)?;
    }
    if let Some(n) = opts.grid.or_else(|| {
        file.get("grid").and_then(|v| v.parse().ok())
    }) {
        cfg.grid = Some(n);
    }
    if let Some(s) = pick(&opts.dt, "dt") {
        cfg.dt = parse_dt(&s)?;
    }
    if let Some(out) = opts
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
    {
        cfg.out = Some(out);
    }
    if let Some(r) = opts.refine.or_else(|| {
        file.get("refine").and_then(|v| v.parse().ok())
    }) {
        cfg.refine = r;
    }
    if let Some(s) = opts.seed.or_else(|| {
        file.get("seed").and_then(|v| v.parse().ok())
    }) {
        cfg.seed = s;
    }
    if let Some(s) = pick(&opts.resolutions, "resolutions") {
        cfg.resolutions = parse_resolutions(&s)?;
    }
    Ok(cfg)
}

fn cmd_run(benchmark: &str, opts: &CommonOpts) -> Result<()> {
    let cfg = build_config(benchmark.parse()?, opts)?;
    let outcome = run_benchmark(&cfg)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    if let Some(dir) = &cfg.out {
        println!("artifacts written to {}", dir.display());
    }
    Ok(())
}

fn cmd_converge(benchmark: &str, opts: &CommonOpts) -> Result<()> {
    let cfg = build_config(benchmark.parse()?, opts)?;
    let report = convergence_study(&cfg)?;
    println!("{:>12} {:>14} {:>16} {:>16}", "h", "dt", "emax_phi", "emax_psi");
    for row in &report.rows {
        println!(
            "{:>12.6e} {:>14.6e} {:>16.8e} {:>16.8e}",
            row.h, row.dt, row.e_phi, row.e_psi
        );
    }
    println!(
        "fitted slopes: phi {:.3} (residual {:.2e}), psi {:.3} (residual {:.2e})",
        report.slope_phi, report.residual_phi, report.slope_psi, report.residual_psi
    );
    if let Some(dir) = &cfg.out {
        println!("error table written to {}", dir.join("errors.csv").display());
    }
    Ok(())
}

fn cmd_stability_scan(opts: &CommonOpts) -> Result<()> {
    // xi in {0.05, 0.10, ..., 0.95}; theta on 721 points of [-pi, pi].
    let xis: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
    let m = 721;
    let thetas: Vec<f64> = (0..m)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (m - 1) as f64)
        .collect();
    let scan = spectral_scan(&xis, &thetas)?;
    println!(
        "scanned {} points; max |lambda| off theta=0: {:.15}",
        scan.rows.len(),
        scan.max_modulus_off_zero
    );
    if let Some(dir) = opts.out.as_deref() {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("stability.csv");
        io::write_stability_csv(&path, &scan)?;
        println!("scan table written to {}", path.display());
    }
    Ok(())
}

fn write_mesh_2d(dir: &Path, mesh: &SurfaceMesh<2>) -> Result<()> {
    io::write_contour_csv(&dir.join("contour.csv"), mesh)?;
    io::write_vtk_polydata(&dir.join("contour.vtk"), mesh)
}

fn write_mesh_3d(dir: &Path, mesh: &SurfaceMesh<3>) -> Result<()> {
    io::write_obj(&dir.join("mesh.obj"), mesh)?;
    io::write_vtk_polydata(&dir.join("mesh.vtk"), mesh)
}

fn cmd_extract(state_file: &Path, opts: &CommonOpts) -> Result<()> {
    let refine = opts.refine.unwrap_or(4);
    let cross = match &opts.cross {
        Some(s) => parse_cross(s)?,
        None => CrossScheme::CellBased,
    };
    let out = opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    match io::read_state(state_file)? {
        StoredState::D2(state) => {
            let mesh = extract_contour(&state, refine, cross);
            let area = measure_volume(&state, refine, cross);
            println!(
                "2D state at t = {}: {} contour vertices, {} segments, enclosed area {:.8e}",
                state.t,
                mesh.vertices.len(),
                mesh.segments.len(),
                area
            );
            write_mesh_2d(&out, &mesh)?;
        }
        StoredState::D3(state) => {
            let mesh = extract_contour(&state, refine, cross);
            let volume = measure_volume(&state, refine, cross);
            println!(
                "3D state at t = {}: {} mesh vertices, {} triangles, enclosed volume {:.8e}",
                state.t,
                mesh.vertices.len(),
                mesh.triangles.len(),
                volume
            );
            write_mesh_3d(&out, &mesh)?;
        }
    }
    println!("artifacts written to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run { benchmark, opts } => cmd_run(benchmark, opts),
        Cmd::Converge { benchmark, opts } => cmd_converge(benchmark, opts),
        Cmd::StabilityScan { opts } => cmd_stability_scan(opts),
        Cmd::Extract { state_file, opts } => cmd_extract(state_file, opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
