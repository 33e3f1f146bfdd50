//! Gradient-augmented level set toolkit.
//!
//! The level set function is augmented by its gradient on the same grid,
//! and both are evolved in a fully coupled fashion: a cell-based p-cubic
//! Hermite interpolant represents the field inside each cell, and a
//! generalized CIR (semi-Lagrangian) scheme traces characteristics backward
//! from the grid points and reads function values and gradients off the
//! interpolant. The crate also ships a classical WENO5 + SSP-RK3 level set
//! solver for comparison, contour/curvature geometry, a von Neumann
//! stability analyzer for the 1D constant-coefficient scheme, and the
//! benchmark drivers behind the `gals` CLI.

pub mod advect;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod hermite;
pub mod io;
pub mod par;
pub mod shapes;
pub mod stability;
pub mod util;
pub mod velocity;
pub mod weno;

/// Dimension tag for operations that need a concrete per-dimension
/// implementation (recursive boundary solves, contour extraction).
pub struct Dim<const P: usize>;

pub use error::{GalsError, Result};
pub use grid::{CellRef, Grid, LevelSetState};
pub use hermite::{CellData, CrossScheme};
