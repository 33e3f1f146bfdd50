//! Initial-condition shapes: exact signed distance functions with
//! analytic gradients, plus the tricubic subgrid presets.
//!
//! Slotted shapes are built from exact feature distances (arcs, segments,
//! box faces), not from grid-based redistancing, so the initial data is
//! reproducible and grid-independent. On the measure-zero ridges where
//! the nearest feature is not unique, the gradient comes from the first
//! feature in a fixed evaluation order.

use crate::error::{GalsError, Result};
use crate::grid::{Grid, LevelSetState};

/// Benchmark initial shapes. Dimension is implied by the variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Circle { center: [f64; 2], r: f64 },
    /// Disk with a rectangular slot of width `slot_w` cut from the bottom
    /// rim upward over length `slot_len`.
    SlottedDisk { center: [f64; 2], r: f64, slot_w: f64, slot_len: f64 },
    Sphere { center: [f64; 3], r: f64 },
    /// Sphere with a box slot cut from the bottom upward, depth measured
    /// from the bottom rim.
    SlottedSphere { center: [f64; 3], r: f64, slot_w: f64, slot_depth: f64 },
    Cube { center: [f64; 3], side: f64 },
    /// Smooth bump `exp(-|x - c|^2) - exp(-r0^2)` (not a distance).
    GaussianBump { center: [f64; 2], r0: f64 },
}

impl ShapeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Circle { .. }
            | ShapeSpec::SlottedDisk { .. }
            | ShapeSpec::GaussianBump { .. } => 2,
            _ => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ShapeSpec::Circle { r, .. } | ShapeSpec::Sphere { r, .. } => r > 0.0,
            ShapeSpec::SlottedDisk { r, slot_w, slot_len, .. } => {
                r > 0.0 && slot_w > 0.0 && slot_len > 0.0
            }
            ShapeSpec::SlottedSphere { r, slot_w, slot_depth, .. } => {
                r > 0.0 && slot_w > 0.0 && slot_depth > 0.0
            }
            ShapeSpec::Cube { side, .. } => side > 0.0,
            ShapeSpec::GaussianBump { r0, .. } => r0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(GalsError::InvalidConfig(format!(
                "shape has a non-positive extent: {self:?}"
            )))
        }
    }
}

/// Value and gradient of a shape's level set function at a point.
pub trait ShapeField<const P: usize> {
    fn value_grad(&self, x: [f64; P]) -> (f64, [f64; P]);
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Distance to a segment and the closest segment point.
fn segment_closest(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> ([f64; 2], f64) {
    let ab = sub2(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (p, norm2(sub2(x, p)))
}

fn circle_sdf(x: [f64; 2], center: [f64; 2], r: f64) -> (f64, [f64; 2]) {
    let d = sub2(x, center);
    let n = norm2(d);
    if n > 0.0 {
        (n - r, [d[0] / n, d[1] / n])
    } else {
        (-r, [1.0, 0.0])
    }
}

fn slotted_disk_sdf(
    x: [f64; 2],
    c: [f64; 2],
    r: f64,
    slot_w: f64,
    slot_len: f64,
) -> (f64, [f64; 2]) {
    let hw = 0.5 * slot_w;
    let y_top = c[1] - r + slot_len;
    // The slot's vertical edges meet the circle at y_int.
    let y_int = c[1] - (r * r - hw * hw).sqrt();
    let in_disk = norm2(sub2(x, c)) < r;
    let in_slot = (x[0] - c[0]).abs() < hw && x[1] < y_top && x[1] > c[1] - r - r;
    let inside = in_disk && !in_slot;

    // Nearest point on the boundary, over the features in fixed order:
    // the arc (circle minus the slot gap), left edge, right edge, top edge.
    let mut best_p = [f64::NAN; 2];
    let mut best_d = f64::INFINITY;
    let mut consider = |p: [f64; 2], d: f64| {
        if d < best_d {
            best_d = d;
            best_p = p;
        }
    };

    let dvec = sub2(x, c);
    let n = norm2(dvec);
    if n > 0.0 {
        let proj = [c[0] + r * dvec[0] / n, c[1] + r * dvec[1] / n];
        let gap = (proj[0] - c[0]).abs() < hw && proj[1] < y_int;
        if !gap {
            consider(proj, (n - r).abs());
        }
    }
    // Arc endpoints (also endpoints of the vertical edges, so the edge
    // features below cover them; listed for the gap projection case).
    for sx in [-1.0, 1.0] {
        let e = [c[0] + sx * hw, y_int];
        consider(e, norm2(sub2(x, e)));
    }
    for sx in [-1.0, 1.0] {
        let a = [c[0] + sx * hw, y_int];
        let b = [c[0] + sx * hw, y_top];
        let (p, d) = segment_closest(x, a, b);
        consider(p, d);
    }
    let (p, d) = segment_closest(x, [c[0] - hw, y_top], [c[0] + hw, y_top]);
    consider(p, d);

    let sign = if inside { -1.0 } else { 1.0 };
    let to_x = sub2(x, best_p);
    let dist = norm2(to_x);
    let grad = if dist > 0.0 {
        [sign * to_x[0] / dist, sign * to_x[1] / dist]
    } else {
        [0.0, 1.0]
    };
    (sign * best_d, grad)
}

fn sphere_sdf(x: [f64; 3], center: [f64; 3], r: f64) -> (f64, [f64; 3]) {
    let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if n > 0.0 {
        (n - r, [d[0] / n, d[1] / n, d[2] / n])
    } else {
        (-r, [1.0, 0.0, 0.0])
    }
}

/// Axis-aligned box SDF via the closest boundary point.
fn box_sdf(x: [f64; 3], center: [f64; 3], half: [f64; 3]) -> (f64, [f64; 3]) {
    let q = [
        (x[0] - center[0]).abs() - half[0],
        (x[1] - center[1]).abs() - half[1],
        (x[2] - center[2]).abs() - half[2],
    ];
    let outside = q.iter().any(|&c| c > 0.0);
    if outside {
        let pos = [q[0].max(0.0), q[1].max(0.0), q[2].max(0.0)];
        let d = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
        let mut g = [0.0; 3];
        for i in 0..3 {
            if q[i] > 0.0 {
                g[i] = (x[i] - center[i]).signum() * pos[i] / d;
            }
        }
        (d, g)
    } else {
        // Inside: the nearest face is along the axis of largest q.
        let mut axis = 0;
        for i in 1..3 {
            if q[i] > q[axis] {
                axis = i;
            }
        }
        let mut g = [0.0; 3];
        g[axis] = (x[axis] - center[axis]).signum();
        if g[axis] == 0.0 {
            g[axis] = 1.0;
        }
        (q[axis], g)
    }
}

impl ShapeField<2> for ShapeSpec {
    fn value_grad(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        match *self {
            ShapeSpec::Circle { center, r } => circle_sdf(x, center, r),
            ShapeSpec::SlottedDisk { center, r, slot_w, slot_len } => {
                slotted_disk_sdf(x, center, r, slot_w, slot_len)
            }
            ShapeSpec::GaussianBump { center, r0 } => {
                let d = sub2(x, center);
                let e = (-(d[0] * d[0] + d[1] * d[1])).exp();
                // Negative inside radius r0: bump minus the level offset,
                // negated so the blob interior is the negative set.
                ((-r0 * r0).exp() - e, [2.0 * d[0] * e, 2.0 * d[1] * e])
            }
            _ => panic!("{self:?} is not a 2D shape"),
        }
    }
}

impl ShapeField<3> for ShapeSpec {
    fn value_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        match *self {
            ShapeSpec::Sphere { center, r } => sphere_sdf(x, center, r),
            ShapeSpec::Cube { center, side } => box_sdf(x, center, [0.5 * side; 3]),
            ShapeSpec::SlottedSphere { center, r, slot_w, slot_depth } => {
                // Boolean difference approximated by max(d_sphere, -d_box);
                // exact except near the re-entrant intersection curve.
                let (ds, gs) = sphere_sdf(x, center, r);
                let slot_center = [
                    center[0],
                    center[1],
                    center[2] - r + 0.5 * slot_depth,
                ];
                let half = [0.5 * slot_w, r + slot_w, 0.5 * slot_depth];
                let (db, gb) = box_sdf(x, slot_center, half);
                if ds >= -db {
                    (ds, gs)
                } else {
                    (-db, [-gb[0], -gb[1], -gb[2]])
                }
            }
            _ => panic!("{self:?} is not a 3D shape"),
        }
    }
}

/// Single-cell subgrid presets: node data whose Hermite interpolant holds
/// a structure strictly inside cells (invisible to node signs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgridPreset {
    /// Point-like blob: `psi = (x - c)/(3h)` on all three axes.
    Drop,
    /// Tube along the x axis: `psi = (0, y - c, z - c)/(2h)`.
    Jet,
    /// Pair of sheets normal to the y axis: `psi = (0, y - c, 0)/h`.
    Film,
}

/// Build the preset state: `phi = 0.1` at every node and gradients
/// pointing away from the domain center `c` on the preset's active axes.
/// On coarse cells (`h` of order 1) the interpolant dips below zero
/// strictly inside cells near the center, invisible to node signs.
pub fn subgrid_preset(grid: Grid<3>, preset: SubgridPreset) -> LevelSetState<3> {
    let c = [
        0.5 * (grid.lower[0] + grid.upper[0]),
        0.5 * (grid.lower[1] + grid.upper[1]),
        0.5 * (grid.lower[2] + grid.upper[2]),
    ];
    let h = grid.h();
    let scale: [f64; 3] = match preset {
        SubgridPreset::Drop => [1.0 / (3.0 * h); 3],
        SubgridPreset::Jet => [0.0, 1.0 / (2.0 * h), 1.0 / (2.0 * h)],
        SubgridPreset::Film => [0.0, 1.0 / h, 0.0],
    };
    LevelSetState::from_fn(grid, 0.0, |x| {
        let mut g = [0.0; 3];
        for i in 0..3 {
            g[i] = scale[i] * (x[i] - c[i]);
        }
        (0.1, g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    fn zalesak() -> ShapeSpec {
        ShapeSpec::SlottedDisk {
            center: [50.0, 75.0],
            r: 15.0,
            slot_w: 5.0,
            slot_len: 25.0,
        }
    }

    #[test]
    fn circle_center_value() {
        let s = ShapeSpec::Circle { center: [0.5, 0.5], r: 0.2 };
        let (v, _) = ShapeField::<2>::value_grad(&s, [0.5, 0.5]);
        assert_eq!(v, -0.2);
    }

    #[test]
    fn slotted_disk_signs() {
        let s = zalesak();
        // Inside the disk, away from the slot.
        let (v, _) = ShapeField::<2>::value_grad(&s, [40.0, 75.0]);
        assert!(v < 0.0);
        // Inside the slot: outside the shape.
        let (v, _) = ShapeField::<2>::value_grad(&s, [50.0, 70.0]);
        assert!(v > 0.0);
        // Above the slot, still inside the disk.
        let (v, _) = ShapeField::<2>::value_grad(&s, [50.0, 87.0]);
        assert!(v < 0.0);
        // Far outside.
        let (v, _) = ShapeField::<2>::value_grad(&s, [10.0, 10.0]);
        assert!(v > 0.0);
    }

    #[test]
    fn slotted_disk_known_distances() {
        let s = zalesak();
        // Right of the disk on the horizontal through the center.
        let (v, g) = ShapeField::<2>::value_grad(&s, [70.0, 75.0]);
        assert!((v - 5.0).abs() < 1e-12);
        assert!((g[0] - 1.0).abs() < 1e-12);
        // Mid-slot: nearest feature is a vertical slot edge 2.5 away.
        let (v, g) = ShapeField::<2>::value_grad(&s, [50.0, 75.0]);
        assert!((v - 2.5).abs() < 1e-12, "{v}");
        assert!(g[0].abs() > 0.99);
    }

    #[test]
    fn sdf_unit_gradient_away_from_ridges() {
        // Finite differences double as a unit-gradient check.
        let s = zalesak();
        let mut rng = SplitMix64::new(5);
        let eps = 1e-6;
        let mut checked = 0;
        for _ in 0..2000 {
            let x = [rng.in_range(20.0, 80.0), rng.in_range(45.0, 99.0)];
            let (v, g) = ShapeField::<2>::value_grad(&s, x);
            // Skip points within 2 eps-steps of a ridge: FD there is
            // meaningless. Detect via second differences.
            let fd = |d: [f64; 2]| {
                ShapeField::<2>::value_grad(&s, [x[0] + d[0], x[1] + d[1]]).0
            };
            let gx = (fd([eps, 0.0]) - fd([-eps, 0.0])) / (2.0 * eps);
            let gy = (fd([0.0, eps]) - fd([0.0, -eps])) / (2.0 * eps);
            let lap = (fd([eps, 0.0]) + fd([-eps, 0.0]) + fd([0.0, eps]) + fd([0.0, -eps])
                - 4.0 * v)
                .abs();
            if lap > 10.0 * eps {
                continue;
            }
            assert!((g[0] - gx).abs() < 1e-5 && (g[1] - gy).abs() < 1e-5, "at {x:?}");
            let n = g[0].hypot(g[1]);
            assert!((n - 1.0).abs() < 1e-10, "|grad| = {n} at {x:?}");
            checked += 1;
        }
        assert!(checked > 1500, "only {checked} clean samples");
    }

    #[test]
    fn cube_sdf_values() {
        let s = ShapeSpec::Cube { center: [0.0; 3], side: 2.0 };
        let (v, g) = ShapeField::<3>::value_grad(&s, [2.0, 0.0, 0.0]);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(g, [1.0, 0.0, 0.0]);
        let (v, _) = ShapeField::<3>::value_grad(&s, [0.2, 0.1, -0.3]);
        assert!((v + 0.7).abs() < 1e-15);
        // Outside a corner: Euclidean distance to the corner point.
        let (v, _) = ShapeField::<3>::value_grad(&s, [2.0, 2.0, 2.0]);
        assert!((v - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn slotted_sphere_slot_is_outside() {
        let s = ShapeSpec::SlottedSphere {
            center: [50.0; 3],
            r: 15.0,
            slot_w: 5.0,
            slot_depth: 25.0,
        };
        let (v, _) = ShapeField::<3>::value_grad(&s, [50.0, 50.0, 45.0]);
        assert!(v > 0.0, "slot interior should be outside, got {v}");
        let (v, _) = ShapeField::<3>::value_grad(&s, [42.0, 50.0, 50.0]);
        assert!(v < 0.0);
    }

    #[test]
    fn gaussian_bump_zero_level() {
        let s = ShapeSpec::GaussianBump { center: [0.5, 0.5], r0: 0.3 };
        let (v, _) = ShapeField::<2>::value_grad(&s, [0.8, 0.5]);
        assert!(v.abs() < 1e-14, "zero level at radius r0, got {v}");
        let (v, _) = ShapeField::<2>::value_grad(&s, [0.5, 0.5]);
        assert!(v < 0.0);
    }

    #[test]
    fn drop_preset_dips_in_coarse_cell() {
        use crate::hermite::{reconstruct_cross, CrossScheme};
        let grid: Grid<3> = Grid::new([0.0; 3], [2.0; 3], [3; 3]).unwrap();
        let state = subgrid_preset(grid, SubgridPreset::Drop);
        // All node values positive...
        assert!(state.phi.iter().all(|&p| p > 0.0));
        // ...but the interpolant at the domain-center vertex region dips.
        let cd = reconstruct_cross(&state, [0, 0, 0], CrossScheme::CellBased);
        let center_val = cd.eval([1.0, 1.0, 1.0], [0; 3]);
        assert!(center_val > 0.0); // node itself
        let dip = cd.eval([0.5, 0.5, 0.5], [0; 3]);
        // Center of the cell adjacent to the domain center: the analytic
        // estimate 0.1 - h/8 applies at the domain center itself; check
        // for a sub-node minimum via the full-grid contour instead.
        let _ = dip;
        let mesh = crate::geometry::extract_contour(&state, 4, CrossScheme::CellBased);
        assert!(!mesh.is_empty(), "drop preset should have a contour");
    }
}
