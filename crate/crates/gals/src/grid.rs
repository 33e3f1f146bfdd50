//! Regular Cartesian grids and node storage for the gradient-augmented state.
//!
//! A `Grid<P>` covers an axis-aligned box in `P` dimensions (`P` in 1..=3)
//! with `n[i]` nodes per axis, nodes at `lower + j * dx`. Function values and
//! gradient vectors live on the nodes (`LevelSetState`); cells are addressed
//! by the multi-index of their lower corner.

use crate::error::{GalsError, Result};

/// Relative tolerance (in units of the domain extent) within which a point
/// slightly outside the domain is silently clamped. Backward-traced foot
/// points can leave the box by a few ulp even when the CFL bound holds.
pub const CLAMP_ULPS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<const P: usize> {
    pub lower: [f64; P],
    pub upper: [f64; P],
    /// Node counts per axis, each >= 2.
    pub n: [usize; P],
    pub dx: [f64; P],
}

impl<const P: usize> Grid<P> {
    pub fn new(lower: [f64; P], upper: [f64; P], n: [usize; P]) -> Result<Self> {
        for i in 0..P {
            if !(upper[i] > lower[i]) {
                return Err(GalsError::InvalidGrid(format!(
                    "axis {i}: upper bound {} must exceed lower bound {}",
                    upper[i], lower[i]
                )));
            }
            if n[i] < 2 {
                return Err(GalsError::InvalidGrid(format!(
                    "axis {i}: need at least 2 nodes, got {}",
                    n[i]
                )));
            }
        }
        let mut dx = [0.0; P];
        for i in 0..P {
            dx[i] = (upper[i] - lower[i]) / (n[i] - 1) as f64;
        }
        Ok(Self { lower, upper, n, dx })
    }

    /// Uniform grid on the unit box with `n` nodes per axis.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new([0.0; P], [1.0; P], [n; P])
    }

    /// Largest spacing, the scaling parameter of the accuracy estimates.
    pub fn h(&self) -> f64 {
        self.dx.iter().cloned().fold(0.0, f64::max)
    }

    /// Diagonal extent of the domain.
    pub fn diameter(&self) -> f64 {
        (0..P)
            .map(|i| (self.upper[i] - self.lower[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn num_nodes(&self) -> usize {
        self.n.iter().product()
    }

    pub fn num_cells(&self) -> usize {
        self.n.iter().map(|&ni| ni - 1).product()
    }

    /// Cell counts per axis.
    pub fn cells(&self) -> [usize; P] {
        let mut c = [0; P];
        for i in 0..P {
            c[i] = self.n[i] - 1;
        }
        c
    }

    /// Flat index of a node multi-index (axis P-1 varies fastest).
    #[inline]
    pub fn node_index(&self, j: [usize; P]) -> usize {
        let mut idx = 0;
        for i in 0..P {
            idx = idx * self.n[i] + j[i];
        }
        idx
    }

    /// Inverse of [`node_index`](Self::node_index).
    #[inline]
    pub fn node_multi_index(&self, mut idx: usize) -> [usize; P] {
        let mut j = [0; P];
        for i in (0..P).rev() {
            j[i] = idx % self.n[i];
            idx /= self.n[i];
        }
        j
    }

    #[inline]
    pub fn node_position(&self, j: [usize; P]) -> [f64; P] {
        let mut x = [0.0; P];
        for i in 0..P {
            x[i] = self.lower[i] + j[i] as f64 * self.dx[i];
        }
        x
    }

    /// Per-axis clamp tolerance.
    fn clamp_tol(&self, axis: usize) -> f64 {
        CLAMP_ULPS * f64::EPSILON * (self.upper[axis] - self.lower[axis])
    }

    /// Locate the cell containing `x`. Points exactly on an interior face are
    /// assigned the cell with local coordinate 0 on that axis; the upper
    /// domain boundary is owned by the last cell with local coordinate 1.
    /// Points outside by at most `CLAMP_ULPS` ulp of the extent are clamped;
    /// further out is an error.
    pub fn locate(&self, x: [f64; P]) -> Result<CellRef<P>> {
        let mut cell = [0; P];
        let mut xi = [0.0; P];
        for i in 0..P {
            let tol = self.clamp_tol(i);
            if x[i] < self.lower[i] - tol || x[i] > self.upper[i] + tol {
                return Err(GalsError::OutOfDomain {
                    axis: i,
                    coord: x[i],
                    lower: self.lower[i],
                    upper: self.upper[i],
                });
            }
            let xc = x[i].clamp(self.lower[i], self.upper[i]);
            let s = (xc - self.lower[i]) / self.dx[i];
            let c = (s.floor() as usize).min(self.n[i] - 2);
            cell[i] = c;
            xi[i] = (s - c as f64).clamp(0.0, 1.0);
        }
        Ok(CellRef { cell, xi })
    }

    /// Physical position of a cell-local point.
    pub fn cell_point(&self, cr: &CellRef<P>) -> [f64; P] {
        let mut x = [0.0; P];
        for i in 0..P {
            x[i] = self.lower[i] + (cr.cell[i] as f64 + cr.xi[i]) * self.dx[i];
        }
        x
    }
}

/// A cell multi-index plus local coordinates in `[0,1]^P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRef<const P: usize> {
    pub cell: [usize; P],
    pub xi: [f64; P],
}

/// Node data at one time level: function values `phi` and gradients `psi`,
/// both stored flat in node-index order.
#[derive(Debug, Clone)]
pub struct LevelSetState<const P: usize> {
    pub grid: Grid<P>,
    pub phi: Vec<f64>,
    pub psi: Vec<[f64; P]>,
    pub t: f64,
}

impl<const P: usize> LevelSetState<P> {
    pub fn new(grid: Grid<P>, phi: Vec<f64>, psi: Vec<[f64; P]>, t: f64) -> Result<Self> {
        let n = grid.num_nodes();
        if phi.len() != n || psi.len() != n {
            return Err(GalsError::InvalidGrid(format!(
                "state arrays have lengths {}/{}, grid has {} nodes",
                phi.len(),
                psi.len(),
                n
            )));
        }
        if !phi.iter().all(|v| v.is_finite())
            || !psi.iter().all(|g| g.iter().all(|v| v.is_finite()))
        {
            return Err(GalsError::InvalidGrid("non-finite entry in state".into()));
        }
        Ok(Self { grid, phi, psi, t })
    }

    /// Sample an analytic field (value and gradient) on every node.
    pub fn from_fn(
        grid: Grid<P>,
        t: f64,
        mut f: impl FnMut([f64; P]) -> (f64, [f64; P]),
    ) -> Self {
        let n = grid.num_nodes();
        let mut phi = Vec::with_capacity(n);
        let mut psi = Vec::with_capacity(n);
        for idx in 0..n {
            let x = grid.node_position(grid.node_multi_index(idx));
            let (v, g) = f(x);
            phi.push(v);
            psi.push(g);
        }
        Self { grid, phi, psi, t }
    }

    /// Raw vertex data of one cell: the `2^P` values followed by the `2^P`
    /// gradients, vertices in lexicographic order over `{0,1}^P` with the
    /// last axis varying fastest.
    pub fn gather_cell(&self, cell: [usize; P]) -> (Vec<f64>, Vec<[f64; P]>) {
        let nv = 1usize << P;
        let mut values = Vec::with_capacity(nv);
        let mut grads = Vec::with_capacity(nv);
        for v in 0..nv {
            let idx = self.grid.node_index(vertex_node(cell, v));
            values.push(self.phi[idx]);
            grads.push(self.psi[idx]);
        }
        (values, grads)
    }
}

/// Node multi-index of vertex `v` (bit `P-1-i` of `v` is the offset on axis
/// `i`, so the last axis varies fastest) of the given cell.
#[inline]
pub fn vertex_node<const P: usize>(cell: [usize; P], v: usize) -> [usize; P] {
    let mut j = cell;
    for i in 0..P {
        j[i] += (v >> (P - 1 - i)) & 1;
    }
    j
}
