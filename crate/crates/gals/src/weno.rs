//! Classical level set baseline: fifth-order WENO upwind derivatives,
//! SSP-RK3 advection, and PDE-based reinitialization with a Godunov
//! Hamiltonian. The field carries its own 3-deep ghost layers (the WENO5
//! stencil radius) with a fill policy per face.

use crate::grid::Grid;
use crate::par;
use crate::velocity::VelocityField;

/// Ghost layer depth, the WENO5 stencil radius.
pub const HALO: usize = 3;

/// How ghost values on one face are produced from interior data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HaloFill {
    /// Linear extrapolation from the two outermost interior nodes.
    #[default]
    Extrapolate,
    /// Odd reflection through zero at the boundary node.
    OddSymmetryZero,
    /// Wrap around (node n-1 duplicates node 0).
    Periodic,
}

/// Scalar node field with 3-deep ghost layers on every face.
#[derive(Debug, Clone)]
pub struct ScalarFieldWithHalo<const P: usize> {
    pub grid: Grid<P>,
    /// Fill policy per `[axis][side]`.
    pub fill: [[HaloFill; 2]; P],
    pub t: f64,
    data: Vec<f64>,
    ext: [usize; P],
}

impl<const P: usize> ScalarFieldWithHalo<P> {
    pub fn new(grid: Grid<P>, t: f64) -> Self {
        let mut ext = [0; P];
        for i in 0..P {
            ext[i] = grid.n[i] + 2 * HALO;
        }
        let len = ext.iter().product();
        Self {
            grid,
            fill: [[HaloFill::Extrapolate; 2]; P],
            t,
            data: vec![0.0; len],
            ext,
        }
    }

    pub fn from_fn(grid: Grid<P>, t: f64, mut f: impl FnMut([f64; P]) -> f64) -> Self {
        let mut s = Self::new(grid, t);
        for idx in 0..s.grid.num_nodes() {
            let j = s.grid.node_multi_index(idx);
            let v = f(s.grid.node_position(j));
            s.set(to_isize(j), v);
        }
        s.fill_halo();
        s
    }

    pub fn from_values(grid: Grid<P>, t: f64, values: &[f64]) -> Self {
        let mut s = Self::new(grid, t);
        assert_eq!(values.len(), s.grid.num_nodes());
        for (idx, &v) in values.iter().enumerate() {
            let j = s.grid.node_multi_index(idx);
            s.set(to_isize(j), v);
        }
        s.fill_halo();
        s
    }

    #[inline]
    fn ext_index(&self, j: [isize; P]) -> usize {
        let mut idx = 0usize;
        for i in 0..P {
            debug_assert!(j[i] >= -(HALO as isize) && j[i] < (self.grid.n[i] + HALO) as isize);
            idx = idx * self.ext[i] + (j[i] + HALO as isize) as usize;
        }
        idx
    }

    /// Value at a (possibly ghost) node, offsets in `-3 .. n+3`.
    #[inline]
    pub fn get(&self, j: [isize; P]) -> f64 {
        self.data[self.ext_index(j)]
    }

    #[inline]
    pub fn set(&mut self, j: [isize; P], v: f64) {
        let idx = self.ext_index(j);
        self.data[idx] = v;
    }

    /// Interior values in node-index order.
    pub fn interior(&self) -> Vec<f64> {
        (0..self.grid.num_nodes())
            .map(|idx| self.get(to_isize(self.grid.node_multi_index(idx))))
            .collect()
    }

    /// Populate all ghost layers. Axes are processed in order, each pass
    /// spanning the already-extended range of earlier axes, so corner
    /// ghosts are filled too.
    pub fn fill_halo(&mut self) {
        for axis in 0..P {
            // Iterate over every line along `axis`: earlier axes over
            // their extended range, later axes over the interior.
            let mut sizes = [0usize; P];
            for i in 0..P {
                sizes[i] = if i < axis {
                    self.ext[i]
                } else if i == axis {
                    1
                } else {
                    self.grid.n[i]
                };
            }
            let total: usize = sizes.iter().product();
            let n = self.grid.n[axis] as isize;
            for flat in 0..total {
                let mut j = [0isize; P];
                let mut rem = flat;
                for i in (0..P).rev() {
                    let c = (rem % sizes[i]) as isize;
                    rem /= sizes[i];
                    j[i] = if i < axis { c - HALO as isize } else { c };
                }
                for k in 1..=(HALO as isize) {
                    for side in 0..2 {
                        let (ghost, v) = if side == 0 {
                            (-k, self.ghost_value(&j, axis, 0, k, n))
                        } else {
                            (n - 1 + k, self.ghost_value(&j, axis, 1, k, n))
                        };
                        let mut jg = j;
                        jg[axis] = ghost;
                        self.set(jg, v);
                    }
                }
            }
        }
    }

    fn ghost_value(&self, j: &[isize; P], axis: usize, side: usize, k: isize, n: isize) -> f64 {
        let at = |c: isize| -> f64 {
            let mut jj = *j;
            jj[axis] = c;
            self.get(jj)
        };
        match self.fill[axis][side] {
            HaloFill::Extrapolate => {
                if side == 0 {
                    at(0) + k as f64 * (at(0) - at(1))
                } else {
                    at(n - 1) + k as f64 * (at(n - 1) - at(n - 2))
                }
            }
            HaloFill::OddSymmetryZero => {
                if side == 0 {
                    -at(k)
                } else {
                    -at(n - 1 - k)
                }
            }
            HaloFill::Periodic => {
                // Period is n-1 cells; node n-1 duplicates node 0.
                if side == 0 {
                    at(n - 1 - k)
                } else {
                    at(k)
                }
            }
        }
    }
}

#[inline]
fn to_isize<const P: usize>(j: [usize; P]) -> [isize; P] {
    let mut r = [0isize; P];
    for i in 0..P {
        r[i] = j[i] as isize;
    }
    r
}

/// Which one-sided derivative to reconstruct, chosen by the wind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindSign {
    /// Flow to the right: use the left-biased derivative.
    FromLeft,
    /// Flow to the left: use the right-biased derivative.
    FromRight,
}

/// The WENO5 combination of five consecutive one-sided differences,
/// ordered from the far upwind side inward.
fn weno5_combine(v1: f64, v2: f64, v3: f64, v4: f64, v5: f64) -> f64 {
    const EPS: f64 = 1e-6;
    let s1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3).powi(2) + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3).powi(2);
    let s2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4).powi(2) + 0.25 * (v2 - v4).powi(2);
    let s3 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5).powi(2) + 0.25 * (3.0 * v3 - 4.0 * v4 + v5).powi(2);
    let a1 = 0.1 / (s1 + EPS).powi(2);
    let a2 = 0.6 / (s2 + EPS).powi(2);
    let a3 = 0.3 / (s3 + EPS).powi(2);
    let sum = a1 + a2 + a3;
    let (w1, w2, w3) = (a1 / sum, a2 / sum, a3 / sum);
    w1 * (v1 / 3.0 - 7.0 / 6.0 * v2 + 11.0 / 6.0 * v3)
        + w2 * (-v2 / 6.0 + 5.0 / 6.0 * v3 + v4 / 3.0)
        + w3 * (v3 / 3.0 + 5.0 / 6.0 * v4 - v5 / 6.0)
}

/// WENO5 upwind derivative along `axis` at an interior node. The halo must
/// be filled.
pub fn weno5_upwind_derivative<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    axis: usize,
    node: [usize; P],
    wind: WindSign,
) -> f64 {
    let h = field.grid.dx[axis];
    let j = to_isize(node);
    let d = |m: isize| -> f64 {
        let mut ja = j;
        let mut jb = j;
        ja[axis] += m + 1;
        jb[axis] += m;
        (field.get(ja) - field.get(jb)) / h
    };
    match wind {
        WindSign::FromLeft => weno5_combine(d(-3), d(-2), d(-1), d(0), d(1)),
        WindSign::FromRight => weno5_combine(d(2), d(1), d(0), d(-1), d(-2)),
    }
}

/// `-v . grad(phi)` per interior node, with upwinded WENO5 gradients.
fn advection_rhs<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    vel: &dyn VelocityField<P>,
    t: f64,
) -> Vec<f64> {
    let grid = &field.grid;
    par::map_indexed(grid.num_nodes(), |idx| {
        let j = grid.node_multi_index(idx);
        let x = grid.node_position(j);
        let v = vel.velocity(x, t);
        let mut rhs = 0.0;
        for axis in 0..P {
            if v[axis] == 0.0 {
                continue;
            }
            let wind = if v[axis] > 0.0 {
                WindSign::FromLeft
            } else {
                WindSign::FromRight
            };
            rhs -= v[axis] * weno5_upwind_derivative(field, axis, j, wind);
        }
        rhs
    })
}

fn with_interior<const P: usize>(
    template: &ScalarFieldWithHalo<P>,
    values: &[f64],
    t: f64,
) -> ScalarFieldWithHalo<P> {
    let mut s = ScalarFieldWithHalo::from_values(template.grid.clone(), t, values);
    s.fill = template.fill;
    s.fill_halo();
    s
}

/// One SSP-RK3 advection step of `phi_t = -v . grad(phi)`.
pub fn advect_step_weno<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    vel: &dyn VelocityField<P>,
    dt: f64,
) -> ScalarFieldWithHalo<P> {
    let t = field.t;
    let u0 = field.interior();
    let l0 = advection_rhs(field, vel, t);
    let u1: Vec<f64> = u0.iter().zip(&l0).map(|(u, l)| u + dt * l).collect();
    let f1 = with_interior(field, &u1, t + dt);
    let l1 = advection_rhs(&f1, vel, t + dt);
    let u2: Vec<f64> = (0..u0.len())
        .map(|i| 0.75 * u0[i] + 0.25 * (u1[i] + dt * l1[i]))
        .collect();
    let f2 = with_interior(field, &u2, t + 0.5 * dt);
    let l2 = advection_rhs(&f2, vel, t + 0.5 * dt);
    let unew: Vec<f64> = (0..u0.len())
        .map(|i| u0[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * l2[i]))
        .collect();
    with_interior(field, &unew, t + dt)
}

/// Advance by `dt` in as many equal SSP-RK3 substeps as needed to keep
/// each substep's Courant number (node-sampled sum of |v_i|/h over the
/// step's time span) at or below 0.9. The semi-Lagrangian scheme has no
/// such restriction, so benchmark time steps chosen for it can exceed
/// the Eulerian stability limit of this baseline.
pub fn advect_weno_cfl<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    vel: &dyn VelocityField<P>,
    dt: f64,
) -> ScalarFieldWithHalo<P> {
    let grid = field.grid.clone();
    let h = grid.h();
    let mut smax = 0.0f64;
    for &t in &[field.t, field.t + 0.5 * dt, field.t + dt] {
        for idx in 0..grid.num_nodes() {
            let x = grid.node_position(grid.node_multi_index(idx));
            let v = vel.velocity(x, t);
            smax = smax.max(v.iter().map(|c| c.abs()).sum());
        }
    }
    let n_sub = ((dt * smax / (0.9 * h)).ceil() as usize).max(1);
    let dt_sub = dt / n_sub as f64;
    let mut f = field.clone();
    for _ in 0..n_sub {
        f = advect_step_weno(&f, vel, dt_sub);
    }
    f
}

/// Godunov Hamiltonian: |grad(phi)| biased by the sign of the reference
/// field, from one-sided WENO5 derivatives.
fn godunov_gradient_norm<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    node: [usize; P],
    sign: f64,
) -> f64 {
    let mut sq = 0.0;
    for axis in 0..P {
        let a = weno5_upwind_derivative(field, axis, node, WindSign::FromLeft);
        let b = weno5_upwind_derivative(field, axis, node, WindSign::FromRight);
        let contrib = if sign > 0.0 {
            a.max(0.0).powi(2).max(b.min(0.0).powi(2))
        } else {
            a.min(0.0).powi(2).max(b.max(0.0).powi(2))
        };
        sq += contrib;
    }
    sq.sqrt()
}

fn reinit_rhs<const P: usize>(field: &ScalarFieldWithHalo<P>, smoothed_sign: &[f64]) -> Vec<f64> {
    let grid = &field.grid;
    par::map_indexed(grid.num_nodes(), |idx| {
        let s = smoothed_sign[idx];
        if s == 0.0 {
            return 0.0;
        }
        let j = grid.node_multi_index(idx);
        s * (1.0 - godunov_gradient_norm(field, j, s))
    })
}

/// `n_steps` pseudo-time SSP-RK3 steps of the reinitialization equation
/// `phi_tau = sign(phi_0)(1 - |grad(phi)|)`, with the h-smoothed sign of
/// the input field frozen throughout.
pub fn reinitialize<const P: usize>(
    field: &ScalarFieldWithHalo<P>,
    n_steps: usize,
    dtau: f64,
) -> ScalarFieldWithHalo<P> {
    let h = field.grid.h();
    let phi0 = field.interior();
    let sign: Vec<f64> = phi0
        .iter()
        .map(|&p| p / (p * p + h * h).sqrt())
        .collect();
    let mut cur = field.clone();
    for _ in 0..n_steps {
        let u0 = cur.interior();
        let l0 = reinit_rhs(&cur, &sign);
        let u1: Vec<f64> = u0.iter().zip(&l0).map(|(u, l)| u + dtau * l).collect();
        let f1 = with_interior(field, &u1, field.t);
        let l1 = reinit_rhs(&f1, &sign);
        let u2: Vec<f64> = (0..u0.len())
            .map(|i| 0.75 * u0[i] + 0.25 * (u1[i] + dtau * l1[i]))
            .collect();
        let f2 = with_interior(field, &u2, field.t);
        let l2 = reinit_rhs(&f2, &sign);
        let unew: Vec<f64> = (0..u0.len())
            .map(|i| u0[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dtau * l2[i]))
            .collect();
        cur = with_interior(field, &unew, field.t);
    }
    cur
}
