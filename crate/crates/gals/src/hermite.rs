//! Cell-local p-cubic Hermite interpolation.
//!
//! Each cell carries `4^P` coefficients: function values and gradient
//! components at the `2^P` vertices, plus cross derivatives reconstructed
//! from the node gradients. The interpolant is the tensor product of the
//! 1D cubic Hermite basis `f(x) = 1 - 3x^2 + 2x^3`, `g(x) = x(1-x)^2`,
//! and is differentiated analytically (up to second order per axis).

use crate::error::{GalsError, Result};
use crate::grid::{vertex_node, Grid, LevelSetState};
use crate::util::{fit_order, SplitMix64};

/// `f` and its first two derivatives.
#[inline]
pub fn basis_f(d: usize, x: f64) -> f64 {
    match d {
        0 => 1.0 + x * x * (2.0 * x - 3.0),
        1 => 6.0 * x * (x - 1.0),
        2 => 12.0 * x - 6.0,
        3 => 12.0,
        _ => 0.0,
    }
}

/// `g` and its first two derivatives.
#[inline]
pub fn basis_g(d: usize, x: f64) -> f64 {
    match d {
        0 => x * (1.0 - x) * (1.0 - x),
        1 => 1.0 + x * (3.0 * x - 4.0),
        2 => 6.0 * x - 4.0,
        _ => 6.0 * f64::from(d == 3),
    }
}

/// The 1D basis member `w_a^v` evaluated at derivative order `d`:
/// `f(x)`, `f(1-x)`, `g(x)`, `-g(1-x)` for `(v, a)` in
/// `(0,0), (1,0), (0,1), (1,1)`, with the chain-rule sign for mirrored
/// arguments.
#[inline]
pub fn basis_w(v: usize, a: usize, d: usize, x: f64) -> f64 {
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    match (v, a) {
        (0, 0) => basis_f(d, x),
        (1, 0) => sign * basis_f(d, 1.0 - x),
        (0, 1) => basis_g(d, x),
        (1, 1) => -sign * basis_g(d, 1.0 - x),
        _ => unreachable!("basis indices must be 0 or 1"),
    }
}

/// Cross-derivative reconstruction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossScheme {
    /// Central differences of node gradients across neighboring cells.
    CentralDifference,
    /// Edge-center differences within the cell, combined with weights
    /// 3/4 (nearby) and -1/4 (opposing).
    #[default]
    CellBased,
}

/// Offset of `mask` on `axis` (the last axis occupies the lowest bit).
#[inline]
pub fn bit<const P: usize>(mask: usize, axis: usize) -> usize {
    (mask >> (P - 1 - axis)) & 1
}

/// Multi-index mask with a single 1 on `axis`.
#[inline]
pub fn axis_mask<const P: usize>(axis: usize) -> usize {
    1 << (P - 1 - axis)
}

const MAX_COEFF: usize = 64; // 4^3

/// The `4^P` coefficients defining one cell's interpolant, plus the cell
/// spacings. Coefficient `(v, a)` multiplies `prod_i dx_i^{a_i} w_{a_i}^{v_i}`.
#[derive(Debug, Clone)]
pub struct CellData<const P: usize> {
    coeff: [f64; MAX_COEFF],
    pub dx: [f64; P],
}

impl<const P: usize> CellData<P> {
    pub fn zero(dx: [f64; P]) -> Self {
        Self { coeff: [0.0; MAX_COEFF], dx }
    }

    #[inline]
    pub fn num_vertices() -> usize {
        1 << P
    }

    #[inline]
    pub fn coeff(&self, v: usize, a: usize) -> f64 {
        self.coeff[(v << P) | a]
    }

    #[inline]
    pub fn set_coeff(&mut self, v: usize, a: usize, val: f64) {
        self.coeff[(v << P) | a] = val;
    }

    /// Build from explicit vertex data: values, gradients, and a closure
    /// supplying the cross derivatives `(v, a) -> d^a phi(x_v)` for
    /// `|a| >= 2`. Used for exact-data injection in accuracy checks.
    pub fn from_data(
        dx: [f64; P],
        values: &[f64],
        grads: &[[f64; P]],
        mut cross: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let nv = 1usize << P;
        let mut cd = Self::zero(dx);
        for v in 0..nv {
            cd.set_coeff(v, 0, values[v]);
            for i in 0..P {
                cd.set_coeff(v, axis_mask::<P>(i), grads[v][i]);
            }
            for a in 0..nv {
                if (a as u32).count_ones() >= 2 {
                    cd.set_coeff(v, a, cross(v, a));
                }
            }
        }
        cd
    }

    /// Value of the physical derivative `d^beta H` at local point `xi`,
    /// including the chain-rule powers of the spacings. `beta[i] <= 2`.
    pub fn eval(&self, xi: [f64; P], beta: [usize; P]) -> f64 {
        let mut w = [[[0.0; 2]; 2]; P]; // [axis][v][a]
        let mut scale = [[0.0; 2]; P]; // dx^(a - beta) per axis
        for i in 0..P {
            for vb in 0..2 {
                for ab in 0..2 {
                    w[i][vb][ab] = basis_w(vb, ab, beta[i], xi[i]);
                }
            }
            scale[i][0] = self.dx[i].powi(-(beta[i] as i32));
            scale[i][1] = self.dx[i].powi(1 - beta[i] as i32);
        }
        let nv = 1usize << P;
        let mut sum = 0.0;
        for v in 0..nv {
            for a in 0..nv {
                let c = self.coeff(v, a);
                if c == 0.0 {
                    continue;
                }
                let mut t = c;
                for i in 0..P {
                    let ab = bit::<P>(a, i);
                    t *= w[i][bit::<P>(v, i)][ab] * scale[i][ab];
                }
                sum += t;
            }
        }
        sum
    }

    /// Value and full gradient in one pass. This is the hot path of the
    /// advection step.
    pub fn eval_value_grad(&self, xi: [f64; P]) -> (f64, [f64; P]) {
        let mut w0 = [[[0.0; 2]; 2]; P];
        let mut w1 = [[[0.0; 2]; 2]; P];
        for i in 0..P {
            for vb in 0..2 {
                for ab in 0..2 {
                    w0[i][vb][ab] = basis_w(vb, ab, 0, xi[i]);
                    w1[i][vb][ab] = basis_w(vb, ab, 1, xi[i]);
                }
            }
        }
        let nv = 1usize << P;
        let mut value = 0.0;
        let mut grad = [0.0; P];
        for v in 0..nv {
            for a in 0..nv {
                let c = self.coeff(v, a);
                if c == 0.0 {
                    continue;
                }
                // Per-axis factors at derivative order 0, with dx scaling.
                let mut fac = [0.0; P];
                let mut t = c;
                for i in 0..P {
                    let ab = bit::<P>(a, i);
                    let s = if ab == 1 { self.dx[i] } else { 1.0 };
                    fac[i] = w0[i][bit::<P>(v, i)][ab] * s;
                    t *= fac[i];
                }
                value += t;
                for d in 0..P {
                    let ab = bit::<P>(a, d);
                    let s = if ab == 1 { 1.0 } else { 1.0 / self.dx[d] };
                    let wd = w1[d][bit::<P>(v, d)][ab] * s;
                    let mut td = c * wd;
                    for i in 0..P {
                        if i != d {
                            td *= fac[i];
                        }
                    }
                    grad[d] += td;
                }
            }
        }
        (value, grad)
    }

    /// Full Hessian (second physical derivatives).
    pub fn hessian(&self, xi: [f64; P]) -> [[f64; P]; P] {
        let mut h = [[0.0; P]; P];
        for i in 0..P {
            for j in i..P {
                let mut beta = [0usize; P];
                beta[i] += 1;
                beta[j] += 1;
                let v = self.eval(xi, beta);
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }
}

/// Gather a cell's node data and reconstruct the cross derivatives with the
/// selected scheme.
pub fn reconstruct_cross<const P: usize>(
    state: &LevelSetState<P>,
    cell: [usize; P],
    scheme: CrossScheme,
) -> CellData<P> {
    let grid = &state.grid;
    let nv = 1usize << P;
    let mut cd = CellData::zero(grid.dx);
    for v in 0..nv {
        let idx = grid.node_index(vertex_node(cell, v));
        cd.set_coeff(v, 0, state.phi[idx]);
        for i in 0..P {
            cd.set_coeff(v, axis_mask::<P>(i), state.psi[idx][i]);
        }
    }
    if P == 1 {
        return cd;
    }

    // Second cross derivatives, one per axis pair.
    for p in 0..P {
        for q in (p + 1)..P {
            let amask = axis_mask::<P>(p) | axis_mask::<P>(q);
            for v in 0..nv {
                let val = match scheme {
                    CrossScheme::CellBased => cell_based_pair(state, cell, v, p, q),
                    CrossScheme::CentralDifference => {
                        central_pair(state, cell, v, p, q)
                            .unwrap_or_else(|| cell_based_pair(state, cell, v, p, q))
                    }
                };
                cd.set_coeff(v, amask, val);
            }
        }
    }

    // Third cross derivative (3D only): one value per cell for the
    // cell-based scheme, a per-node 4-point central formula otherwise.
    if P == 3 {
        let amask = (1 << P) - 1;
        let cell_val = cell_based_triple(state, cell);
        for v in 0..nv {
            let val = match scheme {
                CrossScheme::CellBased => cell_val,
                CrossScheme::CentralDifference => {
                    central_triple(state, cell, v).unwrap_or(cell_val)
                }
            };
            cd.set_coeff(v, amask, val);
        }
    }
    cd
}

/// Scheme B: phi_pq at vertex `v` from edge-center differences of the node
/// gradients in the (p, q) facet through `v`, weights 3/4 / -1/4.
fn cell_based_pair<const P: usize>(
    state: &LevelSetState<P>,
    cell: [usize; P],
    v: usize,
    p: usize,
    q: usize,
) -> f64 {
    let grid = &state.grid;
    let psi = |a: usize, b: usize, comp: usize| -> f64 {
        let mut vv = v & !(axis_mask::<P>(p) | axis_mask::<P>(q));
        vv |= a * axis_mask::<P>(p);
        vv |= b * axis_mask::<P>(q);
        state.psi[grid.node_index(vertex_node(cell, vv))][comp]
    };
    // Edge centers: e_p[a] differentiates psi_p along q on the edge with
    // fixed p-offset a; e_q[b] differentiates psi_q along p.
    let e_p = [
        (psi(0, 1, p) - psi(0, 0, p)) / grid.dx[q],
        (psi(1, 1, p) - psi(1, 0, p)) / grid.dx[q],
    ];
    let e_q = [
        (psi(1, 0, q) - psi(0, 0, q)) / grid.dx[p],
        (psi(1, 1, q) - psi(0, 1, q)) / grid.dx[p],
    ];
    let va = bit::<P>(v, p);
    let vb = bit::<P>(v, q);
    0.75 * (e_p[va] + e_q[vb]) - 0.25 * (e_p[1 - va] + e_q[1 - vb])
}

/// Scheme A: phi_pq at the node underlying vertex `v` by central
/// differencing psi_q along axis p. `None` when a neighbor is missing.
fn central_pair<const P: usize>(
    state: &LevelSetState<P>,
    cell: [usize; P],
    v: usize,
    p: usize,
    q: usize,
) -> Option<f64> {
    let grid = &state.grid;
    let node = vertex_node(cell, v);
    if node[p] == 0 || node[p] + 1 >= grid.n[p] {
        return None;
    }
    let mut jm = node;
    jm[p] -= 1;
    let mut jp = node;
    jp[p] += 1;
    let d = state.psi[grid.node_index(jp)][q] - state.psi[grid.node_index(jm)][q];
    Some(d / (2.0 * grid.dx[p]))
}

/// Scheme B triple cross: first-order cell formula differencing psi_z over
/// x and y at the cell's lower z-level. One value for the whole cell.
fn cell_based_triple<const P: usize>(state: &LevelSetState<P>, cell: [usize; P]) -> f64 {
    debug_assert_eq!(P, 3);
    let grid = &state.grid;
    let psi_z = |a: usize, b: usize| -> f64 {
        let v = a * axis_mask::<P>(0) + b * axis_mask::<P>(1);
        state.psi[grid.node_index(vertex_node(cell, v))][2]
    };
    (psi_z(1, 1) - psi_z(0, 1) - psi_z(1, 0) + psi_z(0, 0)) / (grid.dx[0] * grid.dx[1])
}

/// Scheme A triple cross: 4-point centered formula for phi_xyz at the node.
fn central_triple<const P: usize>(
    state: &LevelSetState<P>,
    cell: [usize; P],
    v: usize,
) -> Option<f64> {
    debug_assert_eq!(P, 3);
    let grid = &state.grid;
    let node = vertex_node(cell, v);
    if node[0] == 0 || node[0] + 1 >= grid.n[0] || node[1] == 0 || node[1] + 1 >= grid.n[1] {
        return None;
    }
    let psi_z = |di: isize, dj: isize| -> f64 {
        let mut j = node;
        j[0] = (j[0] as isize + di) as usize;
        j[1] = (j[1] as isize + dj) as usize;
        state.psi[grid.node_index(j)][2]
    };
    Some(
        (psi_z(1, 1) - psi_z(-1, 1) - psi_z(1, -1) + psi_z(-1, -1))
            / (4.0 * grid.dx[0] * grid.dx[1]),
    )
}

/// A smooth scalar field with analytic derivatives, the reference for
/// interpolation accuracy measurements.
pub trait SmoothField<const P: usize> {
    /// `d^alpha phi` at `x`; `alpha[i] <= 2`.
    fn derivative(&self, x: [f64; P], alpha: [usize; P]) -> f64;

    fn value(&self, x: [f64; P]) -> f64 {
        self.derivative(x, [0; P])
    }

    fn gradient(&self, x: [f64; P]) -> [f64; P] {
        let mut g = [0.0; P];
        for i in 0..P {
            let mut a = [0; P];
            a[i] = 1;
            g[i] = self.derivative(x, a);
        }
        g
    }
}

/// Measure interpolation convergence orders for derivative levels
/// `|alpha| = 0, 1, 2` over a grid sequence: the max-error at 1000 random
/// points per level, fitted against `log h`.
pub fn interp_error_orders<const P: usize>(
    field: &dyn SmoothField<P>,
    grids: &[Grid<P>],
    scheme: CrossScheme,
    seed: u64,
) -> Result<[f64; 3]> {
    if grids.len() < 3 {
        return Err(GalsError::InsufficientData {
            needed: 3,
            got: grids.len(),
        });
    }
    let mut hs = Vec::new();
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for grid in grids {
        let state =
            LevelSetState::from_fn(grid.clone(), 0.0, |x| (field.value(x), field.gradient(x)));
        let mut rng = SplitMix64::new(seed);
        let mut emax = [0.0f64; 3];
        for _ in 0..1000 {
            let mut x = [0.0; P];
            for i in 0..P {
                x[i] = rng.in_range(grid.lower[i], grid.upper[i]);
            }
            let cr = grid.locate(x).expect("sample inside domain");
            let cd = reconstruct_cross(&state, cr.cell, scheme);
            // |alpha| = 0
            let e0 = (cd.eval(cr.xi, [0; P]) - field.value(x)).abs();
            emax[0] = emax[0].max(e0);
            // |alpha| = 1
            for i in 0..P {
                let mut a = [0; P];
                a[i] = 1;
                let e = (cd.eval(cr.xi, a) - field.derivative(x, a)).abs();
                emax[1] = emax[1].max(e);
            }
            // |alpha| = 2
            for i in 0..P {
                for j in i..P {
                    let mut a = [0; P];
                    a[i] += 1;
                    a[j] += 1;
                    let e = (cd.eval(cr.xi, a) - field.derivative(x, a)).abs();
                    emax[2] = emax[2].max(e);
                }
            }
        }
        hs.push(grid.h());
        for k in 0..3 {
            errs[k].push(emax[k]);
        }
    }
    Ok([
        fit_order(&hs, &errs[0]),
        fit_order(&hs, &errs[1]),
        fit_order(&hs, &errs[2]),
    ])
}
