//! Generalized CIR advection of the gradient-augmented state.
//!
//! One step traces a characteristic backward from every grid node with a
//! superconsistent integrator (the discrete flow map and its Jacobian are
//! advanced together, so the gradient update is exactly the gradient of the
//! value update), reads function value and gradient off the cell-local
//! Hermite interpolant at the foot point, and maps the gradient forward
//! with the Jacobian. Inflow boundaries are handled either by Dirichlet
//! data (the normal derivative reconstructed from the PDE) or homogeneous
//! Neumann conditions, which reduce to the same advection problem on the
//! boundary face and are solved by the same machinery one dimension down.

use std::sync::Arc;

use crate::error::{GalsError, Result};
use crate::grid::{Grid, LevelSetState};
use crate::hermite::{reconstruct_cross, CrossScheme};
use crate::par;
use crate::util::{mat_identity, mat_mul, mat_vec};
use crate::velocity::{VelocityField, VelocitySample};

/// Time integrator for the backward characteristic trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    ShuOsherRK3,
}

/// How the node gradients are advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientUpdate {
    /// psi_new = (grad of the flow map) * (interpolated gradient at the
    /// foot point) — the update is the exact gradient of the value update.
    #[default]
    Superconsistent,
    /// Explicit trapezoidal rule on the gradient transport ODE along the
    /// already-computed characteristic.
    HeunRK2,
}

/// Boundary data for a Dirichlet inflow face: the prescribed value together
/// with its time derivative and tangential space derivatives, from which
/// the stepper reconstructs the normal derivative.
pub trait DirichletData<const P: usize>: Send + Sync {
    fn phi(&self, x: [f64; P], t: f64) -> f64;
    fn phi_t(&self, x: [f64; P], t: f64) -> f64;
    /// `d phi / d x_axis` for a tangential axis.
    fn phi_tangential(&self, x: [f64; P], t: f64, axis: usize) -> f64;
}

/// Per-face boundary treatment.
#[derive(Clone, Default)]
pub enum BoundaryCondition<const P: usize> {
    /// No condition: a characteristic leaving the domain here is an error.
    #[default]
    None,
    /// Zero normal derivative; the face evolves by tangential advection.
    HomogeneousNeumann,
    Dirichlet(Arc<dyn DirichletData<P>>),
    /// Wrap characteristics around; the state must be periodic (node n-1
    /// duplicating node 0 on this axis).
    Periodic,
}

impl<const P: usize> std::fmt::Debug for BoundaryCondition<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::None => write!(f, "None"),
            Self::HomogeneousNeumann => write!(f, "HomogeneousNeumann"),
            Self::Dirichlet(_) => write!(f, "Dirichlet(..)"),
            Self::Periodic => write!(f, "Periodic"),
        }
    }
}

/// Options for one advection step. `boundary[axis][side]` is the condition
/// on the lower (`side = 0`) / upper (`side = 1`) face of `axis`.
#[derive(Debug, Clone)]
pub struct StepOptions<const P: usize> {
    pub integrator: Integrator,
    pub gradient: GradientUpdate,
    pub cross: CrossScheme,
    pub dt: f64,
    pub boundary: [[BoundaryCondition<P>; 2]; P],
}

impl<const P: usize> StepOptions<P> {
    pub fn new(dt: f64) -> Self {
        Self {
            integrator: Integrator::default(),
            gradient: GradientUpdate::default(),
            cross: CrossScheme::default(),
            dt,
            boundary: std::array::from_fn(|_| [BoundaryCondition::None, BoundaryCondition::None]),
        }
    }

    pub fn with_neumann(mut self) -> Self {
        for face in self.boundary.iter_mut().flatten() {
            *face = BoundaryCondition::HomogeneousNeumann;
        }
        self
    }

    pub fn with_periodic(mut self) -> Self {
        for face in self.boundary.iter_mut().flatten() {
            *face = BoundaryCondition::Periodic;
        }
        self
    }
}

/// Default time-step bound: characteristics move at most half a cell, so
/// they cannot cross and feet of interior nodes stay inside the domain.
pub fn cfl_dt(h: f64, v_max: f64) -> f64 {
    h / (2.0 * v_max)
}

/// Foot point of the backward characteristic and the Jacobian of the
/// discrete flow map `x -> foot(x)`. `jac[i][j] = d foot_j / d x_i`.
#[derive(Debug, Clone, Copy)]
pub struct TraceResult<const P: usize> {
    pub x: [f64; P],
    pub jac: [[f64; P]; P],
}

/// Trace the characteristic through `(x, t + dt)` backward to time `t`,
/// carrying the flow-map Jacobian through every stage.
pub fn trace_backward<const P: usize>(
    x: [f64; P],
    t: f64,
    dt: f64,
    field: &dyn VelocityField<P>,
    integrator: Integrator,
) -> TraceResult<P> {
    let s1 = field.sample(x, t + dt);
    match integrator {
        Integrator::Euler => TraceResult {
            x: axpy(x, -dt, s1.v),
            jac: jac_step(&[(1.0, &s1.grad)], dt),
        },
        Integrator::ShuOsherRK3 => {
            // Stage times run backward: t+dt, t, t+dt/2. Each stage's
            // velocity gradient is chained with the Jacobian of the point
            // it is evaluated at.
            let x1 = axpy(x, -dt, s1.v);
            let j1 = jac_step(&[(1.0, &s1.grad)], dt);
            let s2 = field.sample(x1, t);
            let g2 = mat_mul(&j1, &s2.grad);
            let x2 = axpy(x, -dt, comb(&[(0.25, s1.v), (0.25, s2.v)]));
            let j2 = jac_step(&[(0.25, &s1.grad), (0.25, &g2)], dt);
            let s3 = field.sample(x2, t + 0.5 * dt);
            let g3 = mat_mul(&j2, &s3.grad);
            let xf = axpy(
                x,
                -dt,
                comb(&[(1.0 / 6.0, s1.v), (1.0 / 6.0, s2.v), (2.0 / 3.0, s3.v)]),
            );
            let jf = jac_step(&[(1.0 / 6.0, &s1.grad), (1.0 / 6.0, &g2), (2.0 / 3.0, &g3)], dt);
            TraceResult { x: xf, jac: jf }
        }
    }
}

#[inline]
fn axpy<const P: usize>(x: [f64; P], a: f64, v: [f64; P]) -> [f64; P] {
    let mut r = x;
    for i in 0..P {
        r[i] += a * v[i];
    }
    r
}

#[inline]
fn comb<const P: usize>(terms: &[(f64, [f64; P])]) -> [f64; P] {
    let mut r = [0.0; P];
    for (w, v) in terms {
        for i in 0..P {
            r[i] += w * v[i];
        }
    }
    r
}

/// `I - dt * sum_k w_k G_k`.
#[inline]
fn jac_step<const P: usize>(terms: &[(f64, &[[f64; P]; P])], dt: f64) -> [[f64; P]; P] {
    let mut m = mat_identity::<P>();
    for (w, g) in terms {
        for i in 0..P {
            for j in 0..P {
                m[i][j] -= dt * w * g[i][j];
            }
        }
    }
    m
}

pub use crate::Dim;

/// Homogeneous-Neumann face update: the boundary face evolves by the
/// tangential advection equation, solved with the same CIR scheme one
/// dimension down (a face point in 1D simply keeps its value).
pub trait FaceSolver<const P: usize> {
    /// New `(phi, psi)` for every node of the face `(axis, side)`, in
    /// face-node order (remaining axes lexicographic, last fastest). The
    /// normal gradient component is the prescribed zero.
    fn neumann_face(
        state: &LevelSetState<P>,
        field: &dyn VelocityField<P>,
        opts: &StepOptions<P>,
        axis: usize,
        side: usize,
    ) -> Result<Vec<(f64, [f64; P])>>;
}

fn face_node_coord<const P: usize>(grid: &Grid<P>, axis: usize, side: usize) -> usize {
    if side == 0 {
        0
    } else {
        grid.n[axis] - 1
    }
}

impl FaceSolver<1> for Dim<1> {
    fn neumann_face(
        state: &LevelSetState<1>,
        _field: &dyn VelocityField<1>,
        _opts: &StepOptions<1>,
        axis: usize,
        side: usize,
    ) -> Result<Vec<(f64, [f64; 1])>> {
        // The boundary equation phi_t + u phi_x = 0 with phi_x = 0 is
        // phi_t = 0: the endpoint keeps its value.
        let j = face_node_coord(&state.grid, axis, side);
        Ok(vec![(state.phi[j], [0.0])])
    }
}

/// Restriction of a `P`-dimensional field to a boundary face: tangential
/// velocity components and the tangential block of the deformation matrix.
struct FaceField<'a, const P: usize, const Q: usize> {
    field: &'a dyn VelocityField<P>,
    axis: usize,
    coord: f64,
    tang: [usize; Q],
}

impl<'a, const P: usize, const Q: usize> FaceField<'a, P, Q> {
    fn embed(&self, x: [f64; Q]) -> [f64; P] {
        let mut full = [self.coord; P];
        for k in 0..Q {
            full[self.tang[k]] = x[k];
        }
        full[self.axis] = self.coord;
        full
    }

    fn restrict(&self, s: &VelocitySample<P>) -> VelocitySample<Q> {
        let mut v = [0.0; Q];
        let mut grad = [[0.0; Q]; Q];
        for k in 0..Q {
            v[k] = s.v[self.tang[k]];
            for l in 0..Q {
                grad[k][l] = s.grad[self.tang[k]][self.tang[l]];
            }
        }
        VelocitySample { v, grad }
    }
}

impl VelocityField<1> for FaceField<'_, 2, 1> {
    fn sample(&self, x: [f64; 1], t: f64) -> VelocitySample<1> {
        self.restrict(&self.field.sample(self.embed(x), t))
    }
}

impl VelocityField<2> for FaceField<'_, 3, 2> {
    fn sample(&self, x: [f64; 2], t: f64) -> VelocitySample<2> {
        self.restrict(&self.field.sample(self.embed(x), t))
    }
}

/// A condition carried down to a face-edge solve. Dirichlet data does not
/// restrict automatically, so it degrades to homogeneous Neumann on edges.
fn demote<const P: usize, const Q: usize>(bc: &BoundaryCondition<P>) -> BoundaryCondition<Q> {
    match bc {
        BoundaryCondition::None => BoundaryCondition::None,
        BoundaryCondition::Periodic => BoundaryCondition::Periodic,
        BoundaryCondition::HomogeneousNeumann | BoundaryCondition::Dirichlet(_) => {
            BoundaryCondition::HomogeneousNeumann
        }
    }
}

impl FaceSolver<2> for Dim<2> {
    fn neumann_face(
        state: &LevelSetState<2>,
        field: &dyn VelocityField<2>,
        opts: &StepOptions<2>,
        axis: usize,
        side: usize,
    ) -> Result<Vec<(f64, [f64; 2])>> {
        let grid = &state.grid;
        let b = 1 - axis;
        let jf = face_node_coord(grid, axis, side);
        let coord = if side == 0 { grid.lower[axis] } else { grid.upper[axis] };
        let fgrid: Grid<1> = Grid::new([grid.lower[b]], [grid.upper[b]], [grid.n[b]])?;
        let mut phi = Vec::with_capacity(grid.n[b]);
        let mut psi = Vec::with_capacity(grid.n[b]);
        for k in 0..grid.n[b] {
            let mut j = [0; 2];
            j[axis] = jf;
            j[b] = k;
            let idx = grid.node_index(j);
            phi.push(state.phi[idx]);
            psi.push([state.psi[idx][b]]);
        }
        let fstate = LevelSetState::new(fgrid, phi, psi, state.t)?;
        let ffield = FaceField::<2, 1> {
            field,
            axis,
            coord,
            tang: [b],
        };
        let fopts = StepOptions::<1> {
            integrator: opts.integrator,
            gradient: opts.gradient,
            cross: opts.cross,
            dt: opts.dt,
            boundary: [[demote(&opts.boundary[b][0]), demote(&opts.boundary[b][1])]],
        };
        let fnew = step(&fstate, &ffield, &fopts)?;
        Ok((0..fnew.phi.len())
            .map(|k| {
                let mut g = [0.0; 2];
                g[b] = fnew.psi[k][0];
                (fnew.phi[k], g)
            })
            .collect())
    }
}

impl FaceSolver<3> for Dim<3> {
    fn neumann_face(
        state: &LevelSetState<3>,
        field: &dyn VelocityField<3>,
        opts: &StepOptions<3>,
        axis: usize,
        side: usize,
    ) -> Result<Vec<(f64, [f64; 3])>> {
        let grid = &state.grid;
        let tang: [usize; 2] = match axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        let jf = face_node_coord(grid, axis, side);
        let coord = if side == 0 { grid.lower[axis] } else { grid.upper[axis] };
        let fgrid: Grid<2> = Grid::new(
            [grid.lower[tang[0]], grid.lower[tang[1]]],
            [grid.upper[tang[0]], grid.upper[tang[1]]],
            [grid.n[tang[0]], grid.n[tang[1]]],
        )?;
        let nf = fgrid.num_nodes();
        let mut phi = Vec::with_capacity(nf);
        let mut psi = Vec::with_capacity(nf);
        for fidx in 0..nf {
            let jq = fgrid.node_multi_index(fidx);
            let mut j = [0; 3];
            j[axis] = jf;
            j[tang[0]] = jq[0];
            j[tang[1]] = jq[1];
            let idx = grid.node_index(j);
            phi.push(state.phi[idx]);
            psi.push([state.psi[idx][tang[0]], state.psi[idx][tang[1]]]);
        }
        let fstate = LevelSetState::new(fgrid, phi, psi, state.t)?;
        let ffield = FaceField::<3, 2> {
            field,
            axis,
            coord,
            tang,
        };
        let fopts = StepOptions::<2> {
            integrator: opts.integrator,
            gradient: opts.gradient,
            cross: opts.cross,
            dt: opts.dt,
            boundary: [
                [demote(&opts.boundary[tang[0]][0]), demote(&opts.boundary[tang[0]][1])],
                [demote(&opts.boundary[tang[1]][0]), demote(&opts.boundary[tang[1]][1])],
            ],
        };
        let fnew = step(&fstate, &ffield, &fopts)?;
        Ok((0..fnew.phi.len())
            .map(|k| {
                let mut g = [0.0; 3];
                g[tang[0]] = fnew.psi[k][0];
                g[tang[1]] = fnew.psi[k][1];
                (fnew.phi[k], g)
            })
            .collect())
    }
}

/// Flat face-node index of a full-grid node lying on a face of `axis`.
fn face_node_index<const P: usize>(grid: &Grid<P>, axis: usize, j: [usize; P]) -> usize {
    let mut idx = 0;
    for i in 0..P {
        if i != axis {
            idx = idx * grid.n[i] + j[i];
        }
    }
    idx
}

enum NodeUpdate<const P: usize> {
    Done(f64, [f64; P]),
    /// Foot left the domain through a homogeneous-Neumann face the node
    /// lies on; filled in by the face solve.
    Pending { axis: usize, side: usize },
}

/// One generalized CIR step: returns the state at `t + dt`.
pub fn step<const P: usize>(
    state: &LevelSetState<P>,
    field: &dyn VelocityField<P>,
    opts: &StepOptions<P>,
) -> Result<LevelSetState<P>>
where
    Dim<P>: FaceSolver<P>,
{
    let grid = &state.grid;
    let t_new = state.t + opts.dt;
    let results = par::map_indexed(grid.num_nodes(), |idx| update_node(state, field, opts, idx));

    let n = grid.num_nodes();
    let mut phi = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    let mut pending: Vec<(usize, usize, usize)> = Vec::new();
    for (idx, r) in results.into_iter().enumerate() {
        match r? {
            NodeUpdate::Done(p, g) => {
                phi.push(p);
                psi.push(g);
            }
            NodeUpdate::Pending { axis, side } => {
                phi.push(state.phi[idx]);
                psi.push([0.0; P]);
                pending.push((idx, axis, side));
            }
        }
    }

    let mut faces: Vec<(usize, usize)> = pending.iter().map(|&(_, a, s)| (a, s)).collect();
    faces.sort_unstable();
    faces.dedup();
    for (axis, side) in faces {
        let data = Dim::<P>::neumann_face(state, field, opts, axis, side)?;
        for &(idx, a, s) in &pending {
            if a == axis && s == side {
                let fidx = face_node_index(grid, axis, grid.node_multi_index(idx));
                phi[idx] = data[fidx].0;
                psi[idx] = data[fidx].1;
            }
        }
    }

    LevelSetState::new(grid.clone(), phi, psi, t_new)
}

fn update_node<const P: usize>(
    state: &LevelSetState<P>,
    field: &dyn VelocityField<P>,
    opts: &StepOptions<P>,
    idx: usize,
) -> Result<NodeUpdate<P>> {
    let grid = &state.grid;
    let j = grid.node_multi_index(idx);
    let x = grid.node_position(j);
    let tr = trace_backward(x, state.t, opts.dt, field, opts.integrator);
    let mut foot = tr.x;
    for i in 0..P {
        if matches!(opts.boundary[i][0], BoundaryCondition::Periodic) {
            let ext = grid.upper[i] - grid.lower[i];
            foot[i] = grid.lower[i] + (foot[i] - grid.lower[i]).rem_euclid(ext);
        }
    }

    let cr = match grid.locate(foot) {
        Ok(cr) => cr,
        Err(GalsError::OutOfDomain { axis, coord, .. }) => {
            let side = usize::from(coord >= grid.upper[axis]);
            match &opts.boundary[axis][side] {
                BoundaryCondition::None => {
                    return Err(GalsError::MissingBoundaryCondition { node: j.to_vec() })
                }
                BoundaryCondition::Dirichlet(data) => {
                    let (p, g) = dirichlet_node(field, data.as_ref(), x, state.t + opts.dt, axis)?;
                    return Ok(NodeUpdate::Done(p, g));
                }
                BoundaryCondition::HomogeneousNeumann | BoundaryCondition::Periodic => {
                    let on_face = j[axis] == face_node_coord(grid, axis, side);
                    if on_face && matches!(opts.boundary[axis][side], BoundaryCondition::HomogeneousNeumann) {
                        return Ok(NodeUpdate::Pending { axis, side });
                    }
                    // Interior node whose foot barely exits (possible only
                    // when dt exceeds the default CFL bound): clamp the
                    // foot onto the domain and interpolate there.
                    let mut fc = foot;
                    for i in 0..P {
                        fc[i] = fc[i].clamp(grid.lower[i], grid.upper[i]);
                    }
                    grid.locate(fc)?
                }
            }
        }
        Err(e) => return Err(e),
    };

    let cd = reconstruct_cross(state, cr.cell, opts.cross);
    let (val, g_foot) = cd.eval_value_grad(cr.xi);
    let psi_new = match opts.gradient {
        GradientUpdate::Superconsistent => mat_vec(&tr.jac, &g_foot),
        GradientUpdate::HeunRK2 => {
            let ga = field.sample(foot, state.t).grad;
            let gb = field.sample(x, state.t + opts.dt).grad;
            let k1 = mat_vec(&ga, &g_foot);
            let predictor = axpy(g_foot, -opts.dt, k1);
            let k2 = mat_vec(&gb, &predictor);
            let mut p = g_foot;
            for i in 0..P {
                p[i] -= 0.5 * opts.dt * (k1[i] + k2[i]);
            }
            p
        }
    };
    Ok(NodeUpdate::Done(val, psi_new))
}

/// Dirichlet inflow node: take `phi` and the tangential derivatives from
/// the boundary data and reconstruct the normal derivative from the PDE,
/// `phi_n = -(phi_t + sum_tangential v_q phi_q) / v_n`.
fn dirichlet_node<const P: usize>(
    field: &dyn VelocityField<P>,
    data: &dyn DirichletData<P>,
    x: [f64; P],
    t: f64,
    axis: usize,
) -> Result<(f64, [f64; P])> {
    let v = field.velocity(x, t);
    if v[axis] == 0.0 {
        return Err(GalsError::DegenerateInflow { point: x.to_vec() });
    }
    let mut g = [0.0; P];
    let mut adv = data.phi_t(x, t);
    for q in 0..P {
        if q != axis {
            g[q] = data.phi_tangential(x, t, q);
            adv += v[q] * g[q];
        }
    }
    g[axis] = -adv / v[axis];
    Ok((data.phi(x, t), g))
}

/// Boundary data for one face after a step, in face-node order: the
/// Neumann face solve or the Dirichlet reconstruction, by configuration.
pub fn apply_inflow_bc<const P: usize>(
    state: &LevelSetState<P>,
    field: &dyn VelocityField<P>,
    opts: &StepOptions<P>,
    axis: usize,
    side: usize,
) -> Result<Vec<(f64, [f64; P])>>
where
    Dim<P>: FaceSolver<P>,
{
    match &opts.boundary[axis][side] {
        BoundaryCondition::HomogeneousNeumann => {
            Dim::<P>::neumann_face(state, field, opts, axis, side)
        }
        BoundaryCondition::Dirichlet(data) => {
            let grid = &state.grid;
            let jf = face_node_coord(grid, axis, side);
            let t_new = state.t + opts.dt;
            let mut out = Vec::new();
            for idx in 0..grid.num_nodes() {
                let j = grid.node_multi_index(idx);
                if j[axis] == jf {
                    out.push(dirichlet_node(
                        field,
                        data.as_ref(),
                        grid.node_position(j),
                        t_new,
                        axis,
                    )?);
                }
            }
            Ok(out)
        }
        bc => Err(GalsError::InvalidConfig(format!(
            "face ({axis}, {side}) has boundary condition {bc:?}, which prescribes no inflow data"
        ))),
    }
}
