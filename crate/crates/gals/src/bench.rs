//! Benchmark drivers: initial conditions, time stepping orchestration for
//! the gradient-augmented and WENO baselines, maximum-norm error reports,
//! convergence fits, and artifact emission (CSV tables, contours, meshes).

use std::f64::consts::PI;
use std::path::Path;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::advect::{
    step, BoundaryCondition, DirichletData, FaceSolver, GradientUpdate, Integrator, StepOptions,
};
use crate::geometry::{extract_contour, measure_volume, ContourDim, SurfaceMesh};
use crate::grid::{Grid, LevelSetState};
use crate::hermite::CrossScheme;
use crate::io::{self, StoredState};
use crate::shapes::{ShapeField, ShapeSpec};
use crate::util::fit_line;
use crate::velocity::{FieldSpec, VelocityField};
use crate::weno::{advect_weno_cfl, reinitialize, ScalarFieldWithHalo};
use crate::{Dim, GalsError, Result};

/// Advection scheme selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    /// Gradient-augmented CIR, superconsistent Shu-Osher RK3 trace.
    GalsRk3,
    /// Gradient-augmented CIR with the Heun gradient update.
    GalsHeun,
    /// Gradient-augmented CIR with a forward-Euler trace (first order).
    GalsEuler,
    /// WENO5 + SSP-RK3 on function values only.
    Weno,
    /// WENO5 + SSP-RK3 with two reinitialization steps per advection step.
    WenoReinit,
}

impl SchemeId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::GalsRk3 => "gals-rk3",
            SchemeId::GalsHeun => "gals-heun",
            SchemeId::GalsEuler => "gals-euler",
            SchemeId::Weno => "weno",
            SchemeId::WenoReinit => "weno-reinit",
        }
    }

    pub fn is_gals(&self) -> bool {
        matches!(self, SchemeId::GalsRk3 | SchemeId::GalsHeun | SchemeId::GalsEuler)
    }
}

impl FromStr for SchemeId {
    type Err = GalsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gals-rk3" => Ok(SchemeId::GalsRk3),
            "gals-heun" => Ok(SchemeId::GalsHeun),
            "gals-euler" => Ok(SchemeId::GalsEuler),
            "weno" => Ok(SchemeId::Weno),
            "weno-reinit" => Ok(SchemeId::WenoReinit),
            other => Err(GalsError::InvalidConfig(format!("unknown scheme: {other}"))),
        }
    }
}

/// Benchmark identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkId {
    /// Smooth bump under the exponential pseudo-1D flow; local truncation
    /// error against the analytic solution after 16 steps.
    Pseudo1d,
    /// Vortex-in-a-box with period 2; global error against the initial
    /// condition after one full period.
    Vortex,
    /// Vortex-in-a-box with period 8: a circle swirled into a thin spiral
    /// and back; area-loss comparison.
    Swirl,
    /// Slotted disk rigid rotation on [0,100]^2, 4 revolutions.
    Zalesak,
    /// Slotted sphere rigid rotation on [0,100]^3, 1 revolution.
    ZalesakSphere,
    /// 3D deformation of a sphere, period 2.5; volume-loss comparison.
    Sphere,
    /// 3D deformation of a cube, period 2.5; volume-loss comparison.
    Cube,
    /// Curvature recovered from the interpolant of ((x-2)(y-x))^3; no
    /// advection.
    Curvature,
}

impl BenchmarkId {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkId::Pseudo1d => "pseudo-1d",
            BenchmarkId::Vortex => "vortex",
            BenchmarkId::Swirl => "swirl",
            BenchmarkId::Zalesak => "zalesak",
            BenchmarkId::ZalesakSphere => "zalesak-sphere",
            BenchmarkId::Sphere => "sphere",
            BenchmarkId::Cube => "cube",
            BenchmarkId::Curvature => "curvature",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BenchmarkId::ZalesakSphere | BenchmarkId::Sphere | BenchmarkId::Cube => 3,
            _ => 2,
        }
    }
}

impl FromStr for BenchmarkId {
    type Err = GalsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo-1d" => Ok(BenchmarkId::Pseudo1d),
            "vortex" => Ok(BenchmarkId::Vortex),
            "swirl" => Ok(BenchmarkId::Swirl),
            "zalesak" => Ok(BenchmarkId::Zalesak),
            "zalesak-sphere" => Ok(BenchmarkId::ZalesakSphere),
            "sphere" => Ok(BenchmarkId::Sphere),
            "cube" => Ok(BenchmarkId::Cube),
            "curvature" => Ok(BenchmarkId::Curvature),
            other => Err(GalsError::InvalidConfig(format!("unknown benchmark: {other}"))),
        }
    }
}

/// A benchmark run request. Unset options fall back to the benchmark's
/// reference parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub benchmark: BenchmarkId,
    pub scheme: SchemeId,
    pub cross: CrossScheme,
    /// Cells per axis; `None` = benchmark default.
    pub grid: Option<usize>,
    /// Nominal time step; `None` = benchmark default. The actual step is
    /// adjusted so an integer number of steps reaches the final time.
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
    /// Contour/volume sampling refinement per cell edge.
    pub refine: usize,
    pub seed: u64,
    /// Grid ladder for convergence studies (strictly increasing).
    pub resolutions: Vec<usize>,
}

impl RunConfig {
    pub fn new(benchmark: BenchmarkId) -> Self {
        Self {
            benchmark,
            scheme: SchemeId::GalsRk3,
            cross: CrossScheme::CellBased,
            grid: None,
            dt: None,
            out: None,
            refine: 4,
            seed: 0,
            resolutions: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.refine == 0 {
            return Err(GalsError::InvalidConfig("refine must be at least 1".into()));
        }
        if let Some(n) = self.grid {
            if n < 4 {
                return Err(GalsError::InvalidConfig("grid must have at least 4 cells".into()));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(GalsError::InvalidConfig("dt must be positive".into()));
            }
        }
        if !self.resolutions.windows(2).all(|w| w[0] < w[1]) {
            return Err(GalsError::InvalidConfig(
                "resolutions must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// One maximum-norm error measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub h: f64,
    pub dt: f64,
    /// max_j |phi_j - phi(x_j)|
    pub e_phi: f64,
    /// max_j max_i |psi_{j,i} - (grad phi)_i(x_j)|
    pub e_psi: f64,
}

/// Per-resolution errors with least-squares convergence slopes.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    pub slope_phi: f64,
    pub slope_psi: f64,
    /// RMS residuals of the log-log line fits.
    pub residual_phi: f64,
    pub residual_psi: f64,
}

impl ErrorReport {
    pub fn from_rows(rows: Vec<ErrorRow>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(GalsError::InsufficientData { needed: 3, got: rows.len() });
        }
        let ln_h: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
        let ln_phi: Vec<f64> = rows.iter().map(|r| r.e_phi.max(1e-300).ln()).collect();
        let ln_psi: Vec<f64> = rows.iter().map(|r| r.e_psi.max(1e-300).ln()).collect();
        let (sp, _, rp) = fit_line(&ln_h, &ln_phi);
        let (sg, _, rg) = fit_line(&ln_h, &ln_psi);
        Ok(Self {
            rows,
            slope_phi: sp,
            slope_psi: sg,
            residual_phi: rp,
            residual_psi: rg,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.h, r.dt, r.e_phi, r.e_psi])
            .collect();
        io::write_csv(path, &["h", "dt", "emax_phi", "emax_psi"], &rows)
    }
}

/// Sample a shape's level set function and gradient on the grid.
pub fn init_level_set<const P: usize>(shape: &ShapeSpec, grid: Grid<P>) -> Result<LevelSetState<P>>
where
    ShapeSpec: ShapeField<P>,
{
    shape.validate()?;
    if shape.dim() != P {
        return Err(GalsError::InvalidConfig(format!(
            "{}-dimensional shape on a {P}-dimensional grid",
            shape.dim()
        )));
    }
    let (lo, hi) = shape_bounds(shape);
    for i in 0..P {
        if lo[i] < grid.lower[i] || hi[i] > grid.upper[i] {
            return Err(GalsError::InvalidConfig(format!(
                "shape extends outside the domain on axis {i}"
            )));
        }
    }
    Ok(LevelSetState::from_fn(grid, 0.0, |x| shape.value_grad(x)))
}

/// Bounding box of the shape's interior (inclusive), per axis.
fn shape_bounds(shape: &ShapeSpec) -> (Vec<f64>, Vec<f64>) {
    let ball = |c: &[f64], r: f64| {
        (
            c.iter().map(|&x| x - r).collect::<Vec<f64>>(),
            c.iter().map(|&x| x + r).collect::<Vec<f64>>(),
        )
    };
    match *shape {
        ShapeSpec::Circle { center, r } => ball(&center, r),
        ShapeSpec::SlottedDisk { center, r, .. } => ball(&center, r),
        ShapeSpec::Sphere { center, r } => ball(&center, r),
        ShapeSpec::SlottedSphere { center, r, .. } => ball(&center, r),
        ShapeSpec::Cube { center, side } => ball(&center, 0.5 * side),
        ShapeSpec::GaussianBump { center, r0 } => ball(&center, r0),
    }
}

/// Exact solution of the pseudo-1D advection of the centered bump: along
/// the flow direction `n`, a particle coordinate `eta = n . x` obeys
/// `eta' = exp(eta)`, so the backward foot at elapsed time `t` is
/// `eta_0 = -ln(exp(-eta) + t)` with the transverse coordinate unchanged.
pub fn pseudo1d_exact(x: [f64; 2], t: f64) -> (f64, [f64; 2]) {
    let s = (2.0 + PI).sqrt();
    let n = [2f64.sqrt() / s, PI.sqrt() / s];
    let eta = n[0] * x[0] + n[1] * x[1];
    let em = (-eta).exp();
    let eta0 = -(em + t).ln();
    // d eta_0 / d eta, for the chain rule on the gradient.
    let d = em / (em + t);
    let x0 = [x[0] + (eta0 - eta) * n[0], x[1] + (eta0 - eta) * n[1]];
    let bump = pseudo1d_shape();
    let (v, g0) = ShapeField::<2>::value_grad(&bump, x0);
    let gn = g0[0] * n[0] + g0[1] * n[1];
    (
        v,
        [
            g0[0] + (d - 1.0) * gn * n[0],
            g0[1] + (d - 1.0) * gn * n[1],
        ],
    )
}

fn pseudo1d_shape() -> ShapeSpec {
    ShapeSpec::GaussianBump { center: [0.5, 0.5], r0: 0.15 }
}

/// Exact boundary data for the pseudo-1D benchmark. The truncation-error
/// study feeds the analytic solution to the inflow faces; a homogeneous
/// Neumann condition there injects an O(1) boundary error that floods the
/// measurement window on the coarser grids.
struct Pseudo1dData;

impl DirichletData<2> for Pseudo1dData {
    fn phi(&self, x: [f64; 2], t: f64) -> f64 {
        pseudo1d_exact(x, t).0
    }

    fn phi_t(&self, x: [f64; 2], t: f64) -> f64 {
        let (_, g) = pseudo1d_exact(x, t);
        let v = VelocityField::<2>::velocity(&FieldSpec::Pseudo1D, x, t);
        -(v[0] * g[0] + v[1] * g[1])
    }

    fn phi_tangential(&self, x: [f64; 2], t: f64, axis: usize) -> f64 {
        pseudo1d_exact(x, t).1[axis]
    }
}

fn gals_opts<const P: usize>(scheme: SchemeId, cross: CrossScheme, dt: f64) -> StepOptions<P> {
    let mut o = StepOptions::new(dt);
    o.cross = cross;
    match scheme {
        SchemeId::GalsRk3 => {}
        SchemeId::GalsHeun => o.gradient = GradientUpdate::HeunRK2,
        SchemeId::GalsEuler => o.integrator = Integrator::Euler,
        SchemeId::Weno | SchemeId::WenoReinit => unreachable!("not a CIR scheme"),
    }
    o
}

/// Gradients by second-order central differences of a halo-extended
/// scalar field, for putting WENO results through the same contour and
/// volume machinery as the gradient-augmented states.
fn state_from_scalar<const P: usize>(f: &ScalarFieldWithHalo<P>) -> LevelSetState<P> {
    let grid = f.grid.clone();
    let phi = f.interior();
    let psi: Vec<[f64; P]> = (0..grid.num_nodes())
        .map(|idx| {
            let j = grid.node_multi_index(idx);
            let mut g = [0.0; P];
            for axis in 0..P {
                let mut a = [0isize; P];
                let mut b = [0isize; P];
                for i in 0..P {
                    a[i] = j[i] as isize;
                    b[i] = j[i] as isize;
                }
                a[axis] += 1;
                b[axis] -= 1;
                g[axis] = (f.get(a) - f.get(b)) / (2.0 * grid.dx[axis]);
            }
            g
        })
        .collect();
    LevelSetState::new(grid, phi, psi, f.t).expect("consistent sizes")
}

fn emax_errors<const P: usize>(
    state: &LevelSetState<P>,
    mut exact: impl FnMut([f64; P]) -> (f64, [f64; P]),
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let grid = &state.grid;
    let mut e_phi = 0.0f64;
    let mut e_psi = 0.0f64;
    for idx in 0..grid.num_nodes() {
        let x = grid.node_position(grid.node_multi_index(idx));
        let mut inside = true;
        for i in 0..P {
            let u = (x[i] - grid.lower[i]) / (grid.upper[i] - grid.lower[i]);
            if u < lo - 1e-12 || u > hi + 1e-12 {
                inside = false;
                break;
            }
        }
        if !inside {
            continue;
        }
        let (v, g) = exact(x);
        e_phi = e_phi.max((state.phi[idx] - v).abs());
        for i in 0..P {
            e_psi = e_psi.max((state.psi[idx][i] - g[i]).abs());
        }
    }
    (e_phi, e_psi)
}

/// Per-dimension artifact plumbing.
pub trait BenchDim<const P: usize> {
    fn write_mesh(dir: &Path, tag: &str, mesh: &SurfaceMesh<P>) -> Result<()>;
    fn store(state: LevelSetState<P>) -> StoredState;
}

impl BenchDim<2> for Dim<2> {
    fn write_mesh(dir: &Path, tag: &str, mesh: &SurfaceMesh<2>) -> Result<()> {
        io::write_contour_csv(&dir.join(format!("contour_{tag}.csv")), mesh)?;
        io::write_vtk_polydata(&dir.join(format!("contour_{tag}.vtk")), mesh)
    }

    fn store(state: LevelSetState<2>) -> StoredState {
        StoredState::D2(state)
    }
}

impl BenchDim<3> for Dim<3> {
    fn write_mesh(dir: &Path, tag: &str, mesh: &SurfaceMesh<3>) -> Result<()> {
        io::write_obj(&dir.join(format!("mesh_{tag}.obj")), mesh)?;
        io::write_vtk_polydata(&dir.join(format!("mesh_{tag}.vtk")), mesh)
    }

    fn store(state: LevelSetState<3>) -> StoredState {
        StoredState::D3(state)
    }
}

/// Count contour crossings of the horizontal line `y` with crossing
/// abscissa in `(x_lo, x_hi)`.
pub fn slot_crossings(mesh: &SurfaceMesh<2>, y: f64, x_lo: f64, x_hi: f64) -> usize {
    mesh.segments
        .iter()
        .filter(|seg| {
            let a = mesh.vertices[seg[0]];
            let b = mesh.vertices[seg[1]];
            let (ya, yb) = (a[1] - y, b[1] - y);
            if (ya < 0.0) == (yb < 0.0) {
                return false;
            }
            let t = ya / (ya - yb);
            let x = a[0] + t * (b[0] - a[0]);
            x > x_lo && x < x_hi
        })
        .count()
}

/// The result of one benchmark run.
pub struct RunOutcome {
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// (t, enclosed volume) at the snapshot times.
    pub volume_series: Vec<(f64, f64)>,
    /// Final errors for the error benchmarks.
    pub error: Option<ErrorRow>,
    /// Contour crossings of the slot midline after the final step
    /// (slotted-disk benchmark only).
    pub slot_crossings: Option<usize>,
    /// Final state, for `extract` and inspection.
    pub state: StoredState,
    pub wall_seconds: f64,
}

struct SurfaceRun<const P: usize> {
    grid: Grid<P>,
    shape: ShapeSpec,
    field: FieldSpec,
    dt: f64,
    n_steps: usize,
    /// Step indices at which volume is recorded and meshes emitted.
    snapshots: Vec<usize>,
    /// (y, x_lo, x_hi) of a slot midline to probe on the final contour.
    crossing_probe: Option<(f64, f64, f64)>,
}

fn run_surface<const P: usize>(cfg: &RunConfig, sr: SurfaceRun<P>) -> Result<RunOutcome>
where
    Dim<P>: FaceSolver<P> + ContourDim<P> + BenchDim<P>,
    ShapeSpec: ShapeField<P>,
    FieldSpec: VelocityField<P>,
{
    let start = Instant::now();
    let out = cfg.out.as_deref();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let mut volume_series = Vec::new();
    let mut final_mesh: Option<SurfaceMesh<P>> = None;

    let mut snapshot = |state: &LevelSetState<P>, step: usize| -> Result<()> {
        let vol = measure_volume(state, cfg.refine, cfg.cross);
        volume_series.push((state.t, vol));
        let mesh = extract_contour(state, cfg.refine, cfg.cross);
        if let Some(dir) = out {
            <Dim<P> as BenchDim<P>>::write_mesh(dir, &format!("{step:06}"), &mesh)?;
        }
        final_mesh = Some(mesh);
        Ok(())
    };

    let final_state: LevelSetState<P> = if cfg.scheme.is_gals() {
        let mut state = init_level_set(&sr.shape, sr.grid.clone())?;
        let opts = gals_opts::<P>(cfg.scheme, cfg.cross, sr.dt).with_neumann();
        snapshot(&state, 0)?;
        for k in 1..=sr.n_steps {
            state = step(&state, &sr.field, &opts)?;
            if sr.snapshots.contains(&k) {
                snapshot(&state, k)?;
            }
        }
        state
    } else {
        let shape = sr.shape;
        let mut field =
            ScalarFieldWithHalo::from_fn(sr.grid.clone(), 0.0, |x| shape.value_grad(x).0);
        let h = sr.grid.h();
        snapshot(&state_from_scalar(&field), 0)?;
        for k in 1..=sr.n_steps {
            field = advect_weno_cfl(&field, &sr.field, sr.dt);
            if cfg.scheme == SchemeId::WenoReinit {
                field = reinitialize(&field, 2, 0.75 * h);
            }
            if sr.snapshots.contains(&k) {
                snapshot(&state_from_scalar(&field), k)?;
            }
        }
        state_from_scalar(&field)
    };

    let crossings = sr
        .crossing_probe
        .and_then(|(y, lo, hi)| {
            let mesh = final_mesh.as_ref()?;
            Some(crossings_generic(mesh, y, lo, hi))
        });

    let v0 = volume_series.first().map(|&(_, v)| v).unwrap_or(0.0);
    let v1 = volume_series.last().map(|&(_, v)| v).unwrap_or(0.0);
    let change = if v0 != 0.0 { 100.0 * (v1 - v0) / v0 } else { 0.0 };
    let mut summary = vec![
        format!(
            "benchmark: {}  scheme: {}  grid: {}  dt: {:.6e}  steps: {}",
            cfg.benchmark.as_str(),
            cfg.scheme.as_str(),
            sr.grid.n[0] - 1,
            sr.dt,
            sr.n_steps
        ),
        format!("initial volume: {:.6e}", v0),
        format!("final volume:   {:.6e}", v1),
        format!("volume change:  {change:+.2}%"),
    ];
    if let Some(c) = crossings {
        summary.push(format!("slot midline crossings on final contour: {c}"));
    }
    let wall = start.elapsed().as_secs_f64();
    summary.push(format!("wall time: {wall:.2} s"));

    if let Some(dir) = out {
        let rows: Vec<Vec<f64>> = volume_series.iter().map(|&(t, v)| vec![t, v]).collect();
        io::write_csv(&dir.join("volume.csv"), &["t", "volume"], &rows)?;
        std::fs::write(&dir.join("summary.txt"), summary.join("\n") + "\n")?;
        write_stored_state(&dir.join("state.txt"), &final_state)?;
    }

    Ok(RunOutcome {
        summary,
        volume_series,
        error: None,
        slot_crossings: crossings,
        state: <Dim<P> as BenchDim<P>>::store(final_state),
        wall_seconds: wall,
    })
}

fn write_stored_state<const P: usize>(path: &Path, state: &LevelSetState<P>) -> Result<()> {
    io::write_state(path, state)
}

/// Dimension-agnostic crossing count (only meaningful for 2D meshes;
/// uses the first two coordinates).
fn crossings_generic<const P: usize>(mesh: &SurfaceMesh<P>, y: f64, lo: f64, hi: f64) -> usize {
    mesh.segments
        .iter()
        .filter(|seg| {
            let a = mesh.vertices[seg[0]];
            let b = mesh.vertices[seg[1]];
            let (ya, yb) = (a[1] - y, b[1] - y);
            if (ya < 0.0) == (yb < 0.0) {
                return false;
            }
            let t = ya / (ya - yb);
            let x = a[0] + t * (b[0] - a[0]);
            x > lo && x < hi
        })
        .count()
}

/// Advect the pseudo-1D bump for 16 steps and measure errors against the
/// analytic solution on the centered square [0.25, 0.75]^2.
fn pseudo1d_errors(
    n: usize,
    scheme: SchemeId,
    cross: CrossScheme,
    dt_override: Option<f64>,
) -> Result<(ErrorRow, LevelSetState<2>)> {
    let grid: Grid<2> = Grid::unit(n + 1)?;
    let h = grid.h();
    let dt = dt_override.unwrap_or(0.5 * h);
    let n_steps = 16;
    let field = FieldSpec::Pseudo1D;
    let state = if scheme.is_gals() {
        let mut state = init_level_set(&pseudo1d_shape(), grid)?;
        let mut opts = gals_opts::<2>(scheme, cross, dt);
        let data: std::sync::Arc<dyn DirichletData<2>> = std::sync::Arc::new(Pseudo1dData);
        for face in opts.boundary.iter_mut().flatten() {
            *face = BoundaryCondition::Dirichlet(data.clone());
        }
        for _ in 0..n_steps {
            state = step(&state, &field, &opts)?;
        }
        state
    } else {
        let shape = pseudo1d_shape();
        let mut f = ScalarFieldWithHalo::from_fn(grid, 0.0, |x| shape.value_grad(x).0);
        for _ in 0..n_steps {
            f = advect_weno_cfl(&f, &field, dt);
            if scheme == SchemeId::WenoReinit {
                f = reinitialize(&f, 2, 0.75 * h);
            }
        }
        state_from_scalar(&f)
    };
    let t = n_steps as f64 * dt;
    let (e_phi, e_psi) = emax_errors(&state, |x| pseudo1d_exact(x, t), 0.25, 0.75);
    Ok((ErrorRow { h, dt, e_phi, e_psi }, state))
}

/// Advect the bump through one full vortex period and measure errors
/// against the initial condition.
fn vortex_errors(
    n: usize,
    scheme: SchemeId,
    cross: CrossScheme,
    dt_override: Option<f64>,
) -> Result<(ErrorRow, LevelSetState<2>)> {
    let period = 2.0;
    let grid: Grid<2> = Grid::unit(n + 1)?;
    let h = grid.h();
    let dt_nominal = dt_override.unwrap_or(h);
    let n_steps = (period / dt_nominal).round().max(1.0) as usize;
    let dt = period / n_steps as f64;
    let field = FieldSpec::VortexBox { period };
    let shape = ShapeSpec::GaussianBump { center: [0.5, 0.75], r0: 0.15 };
    let state = if scheme.is_gals() {
        let mut state = init_level_set(&shape, grid)?;
        let opts = gals_opts::<2>(scheme, cross, dt).with_neumann();
        for _ in 0..n_steps {
            state = step(&state, &field, &opts)?;
        }
        state
    } else {
        let mut f = ScalarFieldWithHalo::from_fn(grid, 0.0, |x| shape.value_grad(x).0);
        for _ in 0..n_steps {
            f = advect_weno_cfl(&f, &field, dt);
            if scheme == SchemeId::WenoReinit {
                f = reinitialize(&f, 2, 0.75 * h);
            }
        }
        state_from_scalar(&f)
    };
    let (e_phi, e_psi) = emax_errors(&state, |x| shape.value_grad(x), 0.0, 1.0);
    Ok((ErrorRow { h, dt, e_phi, e_psi }, state))
}

/// Analytic curvature of `phi = ((x-2)(y-x))^3`, excluding the strip
/// around the gradient-degenerate line y = x.
fn curvature_reference(x: f64, y: f64) -> Option<f64> {
    let u = x - 2.0;
    let w = y - x;
    if w.abs() < 0.1 {
        return None;
    }
    let px = 3.0 * u * u * w * w * (w - u);
    let py = 3.0 * u * u * u * w * w;
    let pxx = 6.0 * u * w * w * w - 18.0 * u * u * w * w + 6.0 * u * u * u * w;
    let pxy = 9.0 * u * u * w * w - 6.0 * u * u * u * w;
    let pyy = 6.0 * u * u * u * w;
    let g2 = px * px + py * py;
    if g2 == 0.0 {
        return None;
    }
    Some((pxx * py * py - 2.0 * pxy * px * py + pyy * px * px) / g2.powf(1.5))
}

/// Maximum curvature error over a 4x-refined sampling grid.
fn curvature_error(n: usize, cross: CrossScheme) -> Result<(ErrorRow, LevelSetState<2>)> {
    let grid: Grid<2> = Grid::unit(n + 1)?;
    let h = grid.h();
    let state = LevelSetState::from_fn(grid, 0.0, |p| {
        let u = p[0] - 2.0;
        let w = p[1] - p[0];
        let phi = (u * w).powi(3);
        let gx = 3.0 * u * u * w * w * (w - u);
        let gy = 3.0 * u * u * u * w * w;
        (phi, [gx, gy])
    });
    let m = 4 * n;
    let mut e_max = 0.0f64;
    for i in 0..=m {
        for j in 0..=m {
            let x = i as f64 / m as f64;
            let y = j as f64 / m as f64;
            let Some(kappa_ref) = curvature_reference(x, y) else { continue };
            let kappa = crate::geometry::curvature_at(&state, [x, y], cross)?;
            e_max = e_max.max((kappa - kappa_ref).abs());
        }
    }
    Ok((ErrorRow { h, dt: 0.0, e_phi: e_max, e_psi: 0.0 }, state))
}

fn error_outcome(
    cfg: &RunConfig,
    row: ErrorRow,
    state: LevelSetState<2>,
    start: Instant,
    label: &str,
) -> Result<RunOutcome> {
    let wall = start.elapsed().as_secs_f64();
    let summary = vec![
        format!(
            "benchmark: {}  scheme: {}  grid: {}  dt: {:.6e}",
            cfg.benchmark.as_str(),
            cfg.scheme.as_str(),
            state.grid.n[0],
            row.dt
        ),
        format!("{label} e_max(phi) = {:.6e}", row.e_phi),
        format!("{label} e_max(psi) = {:.6e}", row.e_psi),
        format!("wall time: {wall:.2} s"),
    ];
    if let Some(dir) = cfg.out.as_deref() {
        std::fs::create_dir_all(dir)?;
        io::write_csv(
            &dir.join("errors.csv"),
            &["h", "dt", "emax_phi", "emax_psi"],
            &[vec![row.h, row.dt, row.e_phi, row.e_psi]],
        )?;
        std::fs::write(&dir.join("summary.txt"), summary.join("\n") + "\n")?;
        io::write_state(&dir.join("state.txt"), &state)?;
    }
    Ok(RunOutcome {
        summary,
        volume_series: Vec::new(),
        error: Some(row),
        slot_crossings: None,
        state: StoredState::D2(state),
        wall_seconds: wall,
    })
}

/// Run one benchmark with the configured scheme and emit artifacts.
pub fn run_benchmark(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    match cfg.benchmark {
        BenchmarkId::Pseudo1d => {
            let n = cfg.grid.unwrap_or(64);
            let (row, state) = pseudo1d_errors(n, cfg.scheme, cfg.cross, cfg.dt)?;
            error_outcome(cfg, row, state, start, "local")
        }
        BenchmarkId::Vortex => {
            let n = cfg.grid.unwrap_or(64);
            let (row, state) = vortex_errors(n, cfg.scheme, cfg.cross, cfg.dt)?;
            error_outcome(cfg, row, state, start, "global")
        }
        BenchmarkId::Curvature => {
            let n = cfg.grid.unwrap_or(64);
            let (row, state) = curvature_error(n, cfg.cross)?;
            error_outcome(cfg, row, state, start, "curvature")
        }
        BenchmarkId::Swirl => {
            let period = 8.0;
            let n = cfg.grid.unwrap_or(64);
            let grid: Grid<2> = Grid::unit(n + 1)?;
            let h = grid.h();
            let dt_nominal = cfg.dt.unwrap_or(h);
            let n_steps = (period / dt_nominal).round().max(1.0) as usize;
            let dt = period / n_steps as f64;
            run_surface(
                cfg,
                SurfaceRun {
                    grid,
                    shape: ShapeSpec::Circle { center: [0.5, 0.75], r: 0.15 },
                    field: FieldSpec::VortexBox { period },
                    dt,
                    n_steps,
                    snapshots: vec![n_steps / 2, n_steps],
                    crossing_probe: None,
                },
            )
        }
        BenchmarkId::Zalesak => {
            let n = cfg.grid.unwrap_or(64);
            let grid: Grid<2> = Grid::new([0.0; 2], [100.0; 2], [n + 1; 2])?;
            let dt_nominal = cfg.dt.unwrap_or(1.0);
            let steps_per_rev = (628.0 / dt_nominal).round().max(1.0) as usize;
            let dt = 628.0 / steps_per_rev as f64;
            let revolutions = 4;
            let n_steps = revolutions * steps_per_rev;
            let snapshots: Vec<usize> =
                (1..=revolutions).map(|r| r * steps_per_rev).collect();
            run_surface(
                cfg,
                SurfaceRun {
                    grid,
                    shape: ShapeSpec::SlottedDisk {
                        center: [50.0, 75.0],
                        r: 15.0,
                        slot_w: 5.0,
                        slot_len: 25.0,
                    },
                    field: FieldSpec::RigidRotation2D,
                    dt,
                    n_steps,
                    snapshots,
                    // Horizontal line through the slot middle: the two
                    // slot walls cross it while the outer rim crossings
                    // fall outside (40, 60).
                    crossing_probe: Some((72.5, 40.0, 60.0)),
                },
            )
        }
        BenchmarkId::ZalesakSphere => {
            let n = cfg.grid.unwrap_or(50);
            let grid: Grid<3> = Grid::new([0.0; 3], [100.0; 3], [n + 1; 3])?;
            let dt_nominal = cfg.dt.unwrap_or(1.0);
            let n_steps = (628.0 / dt_nominal).round().max(1.0) as usize;
            let dt = 628.0 / n_steps as f64;
            let snapshots: Vec<usize> = (1..=4).map(|q| q * n_steps / 4).collect();
            run_surface(
                cfg,
                SurfaceRun {
                    grid,
                    shape: ShapeSpec::SlottedSphere {
                        center: [50.0, 75.0, 50.0],
                        r: 15.0,
                        slot_w: 5.0,
                        slot_depth: 25.0,
                    },
                    field: FieldSpec::RigidRotation3D,
                    dt,
                    n_steps,
                    snapshots,
                    crossing_probe: None,
                },
            )
        }
        BenchmarkId::Sphere | BenchmarkId::Cube => {
            let period = 2.5;
            let n = cfg.grid.unwrap_or(50);
            let grid: Grid<3> = Grid::unit(n + 1)?;
            let h = grid.h();
            let dt_nominal = cfg.dt.unwrap_or(h);
            let n_steps = (period / dt_nominal).round().max(1.0) as usize;
            let dt = period / n_steps as f64;
            let shape = if cfg.benchmark == BenchmarkId::Sphere {
                ShapeSpec::Sphere { center: [0.35; 3], r: 0.15 }
            } else {
                ShapeSpec::Cube { center: [0.35; 3], side: 0.3 }
            };
            let snapshots: Vec<usize> = (1..=4).map(|q| q * n_steps / 4).collect();
            run_surface(
                cfg,
                SurfaceRun {
                    grid,
                    shape,
                    field: FieldSpec::Leveque3D { period },
                    dt,
                    n_steps,
                    snapshots,
                    crossing_probe: None,
                },
            )
        }
    }
}

fn default_resolutions(benchmark: BenchmarkId) -> Vec<usize> {
    match benchmark {
        BenchmarkId::Curvature => vec![16, 32, 64, 128],
        _ => vec![32, 64, 128, 256],
    }
}

/// Run a grid ladder for one of the error benchmarks and fit slopes.
pub fn convergence_study(cfg: &RunConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    let resolutions = if cfg.resolutions.is_empty() {
        default_resolutions(cfg.benchmark)
    } else {
        cfg.resolutions.clone()
    };
    if resolutions.len() < 3 {
        return Err(GalsError::InsufficientData { needed: 3, got: resolutions.len() });
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &n in &resolutions {
        let row = match cfg.benchmark {
            BenchmarkId::Pseudo1d => pseudo1d_errors(n, cfg.scheme, cfg.cross, None)?.0,
            BenchmarkId::Vortex => vortex_errors(n, cfg.scheme, cfg.cross, None)?.0,
            BenchmarkId::Curvature => curvature_error(n, cfg.cross)?.0,
            other => {
                return Err(GalsError::InvalidConfig(format!(
                    "benchmark {} has no convergence study",
                    other.as_str()
                )))
            }
        };
        rows.push(row);
    }
    let report = ErrorReport::from_rows(rows)?;
    if let Some(dir) = cfg.out.as_deref() {
        std::fs::create_dir_all(dir)?;
        report.write_csv(&dir.join("errors.csv"))?;
    }
    Ok(report)
}
