//! Normals, curvature, contour extraction, and volume measurement from
//! the gradient-augmented representation.
//!
//! All geometric quantities come from the cell-local Hermite interpolant,
//! not from the raw node data: contouring subsamples each cell so that
//! subgrid structures (zero-contour pieces invisible to the node signs)
//! are found, and every emitted vertex is polished onto the interpolant's
//! zero set by a safeguarded Newton iteration.

use std::collections::HashMap;

use crate::error::{GalsError, Result};
use crate::grid::{Grid, LevelSetState};
use crate::hermite::{reconstruct_cross, CellData, CrossScheme};
use crate::par;
use crate::Dim;

#[path = "geometry_tables.rs"]
mod tables;

/// Zero-contour mesh: polished vertices plus segments (2D) or triangles
/// (3D); in 1D only the vertices are meaningful.
#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh<const P: usize> {
    pub vertices: Vec<[f64; P]>,
    pub segments: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Per-cell edge subdivisions used during extraction.
    pub refinement: usize,
}

impl<const P: usize> SurfaceMesh<P> {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Chain 2D segments into connected polylines (open chains first from
    /// degree-1 endpoints, then closed loops), in deterministic order.
    pub fn polylines(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (si, seg) in self.segments.iter().enumerate() {
            adj[seg[0]].push(si);
            adj[seg[1]].push(si);
        }
        let mut used = vec![false; self.segments.len()];
        let mut out = Vec::new();
        let walk = |start: usize, used: &mut Vec<bool>| -> Vec<usize> {
            let mut chain = vec![start];
            let mut cur = start;
            loop {
                let next_seg = adj[cur].iter().copied().find(|&si| !used[si]);
                let Some(si) = next_seg else { break };
                used[si] = true;
                let seg = self.segments[si];
                cur = if seg[0] == cur { seg[1] } else { seg[0] };
                chain.push(cur);
            }
            chain
        };
        // Open chains start at odd-degree vertices.
        for v in 0..self.vertices.len() {
            if adj[v].len() % 2 == 1 && adj[v].iter().any(|&si| !used[si]) {
                out.push(walk(v, &mut used));
            }
        }
        // Remaining segments form loops.
        for v in 0..self.vertices.len() {
            if adj[v].iter().any(|&si| !used[si]) {
                out.push(walk(v, &mut used));
            }
        }
        out
    }
}

fn cell_field_scale<const P: usize>(cd: &CellData<P>) -> f64 {
    let nv = 1usize << P;
    let mut s = 0.0f64;
    for v in 0..nv {
        s = s.max(cd.coeff(v, 0).abs());
    }
    s
}

fn grad_norm<const P: usize>(g: &[f64; P]) -> f64 {
    g.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Unit normal `grad(H)/|grad(H)|` at a point.
pub fn normal_at<const P: usize>(
    state: &LevelSetState<P>,
    x: [f64; P],
    scheme: CrossScheme,
) -> Result<[f64; P]> {
    let cr = state.grid.locate(x)?;
    let cd = reconstruct_cross(state, cr.cell, scheme);
    let (_, g) = cd.eval_value_grad(cr.xi);
    let norm = grad_norm(&g);
    if norm <= 1e-12 * cell_field_scale(&cd) / state.grid.h() {
        return Err(GalsError::VanishingGradient { point: x.to_vec() });
    }
    let mut n = g;
    for c in &mut n {
        *c /= norm;
    }
    Ok(n)
}

/// Curvature `div(grad(H)/|grad(H)|)` at a point, assembled from the full
/// Hessian of the interpolant. In 2D this is the familiar closed form
/// `(H_xx H_y^2 - 2 H_x H_y H_xy + H_yy H_x^2)/|grad H|^3`; in 3D it is
/// the sum of the principal curvatures.
pub fn curvature_at<const P: usize>(
    state: &LevelSetState<P>,
    x: [f64; P],
    scheme: CrossScheme,
) -> Result<f64> {
    let cr = state.grid.locate(x)?;
    let cd = reconstruct_cross(state, cr.cell, scheme);
    let (_, g) = cd.eval_value_grad(cr.xi);
    let norm = grad_norm(&g);
    if norm <= 1e-12 * cell_field_scale(&cd) / state.grid.h() {
        return Err(GalsError::VanishingGradient { point: x.to_vec() });
    }
    let hess = cd.hessian(cr.xi);
    let mut lap = 0.0;
    let mut ghg = 0.0;
    for i in 0..P {
        lap += hess[i][i];
        for j in 0..P {
            ghg += g[i] * hess[i][j] * g[j];
        }
    }
    Ok((lap * norm * norm - ghg) / (norm * norm * norm))
}

/// Polish a zero crossing along the local-coordinate segment from `lo` to
/// `hi` (differing only on `axis`) by safeguarded Newton steps, keeping
/// the bracket, until `|H| < tol` or 10 iterations.
fn polish_edge<const P: usize>(
    cd: &CellData<P>,
    lo: [f64; P],
    hi: [f64; P],
    flo: f64,
    fhi: f64,
    axis: usize,
    tol: f64,
) -> [f64; P] {
    let (mut a, mut b) = (lo[axis], hi[axis]);
    let mut fa = flo;
    let mut x = lo;
    let mut t = if flo == fhi {
        0.5 * (a + b)
    } else {
        a + (b - a) * flo / (flo - fhi)
    };
    for _ in 0..10 {
        x[axis] = t;
        let (f, g) = cd.eval_value_grad(x);
        if f.abs() < tol {
            break;
        }
        if (f < 0.0) == (fa < 0.0) {
            a = t;
            fa = f;
        } else {
            b = t;
        }
        let dfdt = g[axis] * cd.dx[axis];
        let tn = t - f / dfdt;
        let (blo, bhi) = (a.min(b), a.max(b));
        t = if dfdt != 0.0 && tn > blo && tn < bhi {
            tn
        } else {
            0.5 * (a + b)
        };
    }
    x[axis] = t;
    x
}

#[inline]
fn local_to_physical<const P: usize>(grid: &Grid<P>, cell: [usize; P], xi: [f64; P]) -> [f64; P] {
    let mut x = [0.0; P];
    for i in 0..P {
        x[i] = grid.lower[i] + (cell[i] as f64 + xi[i]) * grid.dx[i];
    }
    x
}

fn cell_multi_index<const P: usize>(grid: &Grid<P>, mut idx: usize) -> [usize; P] {
    let dims = grid.cells();
    let mut c = [0; P];
    for i in (0..P).rev() {
        c[i] = idx % dims[i];
        idx /= dims[i];
    }
    c
}

/// Hermite samples on the `(s+1)^P` sub-lattice of one cell, last axis
/// fastest.
fn sample_cell<const P: usize>(cd: &CellData<P>, s: usize) -> Vec<f64> {
    let m = s + 1;
    let total = m.pow(P as u32);
    let mut vals = Vec::with_capacity(total);
    for flat in 0..total {
        let mut xi = [0.0; P];
        let mut rem = flat;
        for i in (0..P).rev() {
            xi[i] = (rem % m) as f64 / s as f64;
            rem /= m;
        }
        vals.push(cd.eval(xi, [0; P]));
    }
    vals
}

#[inline]
fn inside(v: f64) -> bool {
    v < 0.0
}

/// Dimension-specific contour extraction (root listing in 1D, marching
/// squares in 2D, marching cubes in 3D) over the refined sampling.
pub trait ContourDim<const P: usize> {
    fn extract(state: &LevelSetState<P>, s: usize, scheme: CrossScheme) -> SurfaceMesh<P>;
}

/// Extract the zero contour of the Hermite interpolant. Each cell is
/// subsampled at `(s+1)^P` points, the marching cases run on the refined
/// sub-lattice (ambiguous faces decided by the interpolant's own center
/// sample), and each vertex is polished until `|H| < 1e-8 * diameter`.
pub fn extract_contour<const P: usize>(
    state: &LevelSetState<P>,
    s: usize,
    scheme: CrossScheme,
) -> SurfaceMesh<P>
where
    Dim<P>: ContourDim<P>,
{
    assert!(s >= 1, "refinement must be at least 1");
    Dim::<P>::extract(state, s, scheme)
}

fn polish_tol<const P: usize>(grid: &Grid<P>) -> f64 {
    1e-8 * grid.diameter()
}

impl ContourDim<1> for Dim<1> {
    fn extract(state: &LevelSetState<1>, s: usize, scheme: CrossScheme) -> SurfaceMesh<1> {
        let grid = &state.grid;
        let tol = polish_tol(grid);
        let mut mesh = SurfaceMesh {
            refinement: s,
            ..Default::default()
        };
        for c in 0..grid.num_cells() {
            let cd = reconstruct_cross(state, [c], scheme);
            let vals = sample_cell(&cd, s);
            for i in 0..s {
                if inside(vals[i]) != inside(vals[i + 1]) {
                    let lo = [i as f64 / s as f64];
                    let hi = [(i + 1) as f64 / s as f64];
                    let xi = polish_edge(&cd, lo, hi, vals[i], vals[i + 1], 0, tol);
                    mesh.vertices.push(local_to_physical(grid, [c], xi));
                }
            }
        }
        mesh
    }
}

/// Global identifier of a sub-lattice edge: the axis it runs along plus
/// the sub-node coordinates of its lower endpoint.
type EdgeKey<const P: usize> = (usize, [usize; P]);

struct CellPiece<const P: usize, const E: usize> {
    verts: Vec<(EdgeKey<P>, [f64; P])>,
    elems: Vec<[EdgeKey<P>; E]>,
}

fn merge_pieces<const P: usize, const E: usize>(
    pieces: Vec<CellPiece<P, E>>,
    s: usize,
) -> (Vec<[f64; P]>, Vec<[usize; E]>) {
    let mut index: HashMap<EdgeKey<P>, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut elems = Vec::new();
    for piece in pieces {
        for (key, pos) in piece.verts {
            index.entry(key).or_insert_with(|| {
                vertices.push(pos);
                vertices.len() - 1
            });
        }
        for elem in piece.elems {
            let mut e = [0usize; E];
            let mut ok = true;
            for (slot, key) in e.iter_mut().zip(elem.iter()) {
                match index.get(key) {
                    Some(&i) => *slot = i,
                    None => {
                        // A neighboring cell classified this edge as not
                        // crossing (near-zero sample disagreement); drop
                        // the element rather than invent a vertex.
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                elems.push(e);
            }
        }
    }
    let _ = s;
    (vertices, elems)
}

/// Marching-squares segment table: corner bits (c0..c3 counterclockwise
/// from the lower-left) set when inside; entries are local edge ids
/// 0 = bottom, 1 = right, 2 = top, 3 = left. Ambiguous cases 5 and 10 are
/// resolved by the cell-center sample.
fn squares_segments(mask: usize, center_inside: bool) -> &'static [[usize; 2]] {
    const NONE: &[[usize; 2]] = &[];
    match mask {
        0 | 15 => NONE,
        1 => &[[3, 0]],
        2 => &[[0, 1]],
        3 => &[[3, 1]],
        4 => &[[1, 2]],
        5 => {
            if center_inside {
                &[[0, 1], [2, 3]]
            } else {
                &[[0, 3], [1, 2]]
            }
        }
        6 => &[[0, 2]],
        7 => &[[3, 2]],
        8 => &[[2, 3]],
        9 => &[[0, 2]],
        10 => {
            if center_inside {
                &[[0, 3], [1, 2]]
            } else {
                &[[0, 1], [2, 3]]
            }
        }
        11 => &[[1, 2]],
        12 => &[[1, 3]],
        13 => &[[0, 1]],
        14 => &[[3, 0]],
        _ => unreachable!(),
    }
}

impl ContourDim<2> for Dim<2> {
    fn extract(state: &LevelSetState<2>, s: usize, scheme: CrossScheme) -> SurfaceMesh<2> {
        let grid = &state.grid;
        let tol = polish_tol(grid);
        let m = s + 1;
        let pieces: Vec<CellPiece<2, 2>> = par::map_indexed(grid.num_cells(), |cidx| {
            let cell = cell_multi_index(grid, cidx);
            let cd = reconstruct_cross(state, cell, scheme);
            let vals = sample_cell(&cd, s);
            let at = |i: usize, j: usize| vals[i * m + j];
            let mut piece = CellPiece {
                verts: Vec::new(),
                elems: Vec::new(),
            };
            for i in 0..s {
                for j in 0..s {
                    let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                    let mask = usize::from(inside(c[0]))
                        | usize::from(inside(c[1])) << 1
                        | usize::from(inside(c[2])) << 2
                        | usize::from(inside(c[3])) << 3;
                    if mask == 0 || mask == 15 {
                        continue;
                    }
                    // Local edges: 0 bottom (axis 0), 1 right (axis 1),
                    // 2 top (axis 0), 3 left (axis 1).
                    let g = [cell[0] * s + i, cell[1] * s + j];
                    let edge_keys: [EdgeKey<2>; 4] = [
                        (0, [g[0], g[1]]),
                        (1, [g[0] + 1, g[1]]),
                        (0, [g[0], g[1] + 1]),
                        (1, [g[0], g[1]]),
                    ];
                    // Edge endpoints as (corner, corner) in local corner ids.
                    let edge_corners = [[0usize, 1], [1, 2], [3, 2], [0, 3]];
                    let corner_xi = |k: usize| -> [f64; 2] {
                        let (di, dj) = match k {
                            0 => (0, 0),
                            1 => (1, 0),
                            2 => (1, 1),
                            _ => (0, 1),
                        };
                        [(i + di) as f64 / s as f64, (j + dj) as f64 / s as f64]
                    };
                    let mut have = [false; 4];
                    let center_xi = [
                        (i as f64 + 0.5) / s as f64,
                        (j as f64 + 0.5) / s as f64,
                    ];
                    let center_inside = inside(cd.eval(center_xi, [0, 0]));
                    for seg in squares_segments(mask, center_inside) {
                        for &e in seg {
                            if !have[e] {
                                have[e] = true;
                                let [a, b] = edge_corners[e];
                                if inside(c[a]) == inside(c[b]) {
                                    continue; // degenerate case pairing
                                }
                                let axis = if e % 2 == 0 { 0 } else { 1 };
                                let xi = polish_edge(
                                    &cd,
                                    corner_xi(a),
                                    corner_xi(b),
                                    c[a],
                                    c[b],
                                    axis,
                                    tol,
                                );
                                piece
                                    .verts
                                    .push((edge_keys[e], local_to_physical(grid, cell, xi)));
                            }
                        }
                        piece.elems.push([edge_keys[seg[0]], edge_keys[seg[1]]]);
                    }
                }
            }
            piece
        });
        let (vertices, segments) = merge_pieces(pieces, s);
        SurfaceMesh {
            vertices,
            segments,
            triangles: Vec::new(),
            refinement: s,
        }
    }
}

impl ContourDim<3> for Dim<3> {
    fn extract(state: &LevelSetState<3>, s: usize, scheme: CrossScheme) -> SurfaceMesh<3> {
        let grid = &state.grid;
        let tol = polish_tol(grid);
        let m = s + 1;
        // Sub-cube corner offsets in the tables' order.
        const CORNERS: [[usize; 3]; 8] = [
            [0, 0, 0],
            [1, 0, 0],
            [1, 1, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, 0, 1],
            [1, 1, 1],
            [0, 1, 1],
        ];
        let pieces: Vec<CellPiece<3, 3>> = par::map_indexed(grid.num_cells(), |cidx| {
            let cell = cell_multi_index(grid, cidx);
            let cd = reconstruct_cross(state, cell, scheme);
            let vals = sample_cell(&cd, s);
            let at = |i: usize, j: usize, k: usize| vals[(i * m + j) * m + k];
            let mut piece = CellPiece {
                verts: Vec::new(),
                elems: Vec::new(),
            };
            for i in 0..s {
                for j in 0..s {
                    for k in 0..s {
                        let cv: [f64; 8] = std::array::from_fn(|q| {
                            let o = CORNERS[q];
                            at(i + o[0], j + o[1], k + o[2])
                        });
                        let mut index = 0usize;
                        for (q, &v) in cv.iter().enumerate() {
                            if inside(v) {
                                index |= 1 << q;
                            }
                        }
                        if index == 0 || index == 255 {
                            continue;
                        }
                        let edge_bits = tables::EDGE_TABLE[index];
                        let mut keys: [Option<EdgeKey<3>>; 12] = [None; 12];
                        for e in 0..12 {
                            if edge_bits & (1 << e) == 0 {
                                continue;
                            }
                            let [a, b] = tables::EDGES[e];
                            if inside(cv[a]) == inside(cv[b]) {
                                continue;
                            }
                            let (oa, ob) = (CORNERS[a], CORNERS[b]);
                            let axis = (0..3).find(|&d| oa[d] != ob[d]).unwrap();
                            // Lower endpoint of the edge in global sub-nodes.
                            let low = if oa[axis] < ob[axis] { oa } else { ob };
                            let key: EdgeKey<3> = (
                                axis,
                                [
                                    cell[0] * s + i + low[0],
                                    cell[1] * s + j + low[1],
                                    cell[2] * s + k + low[2],
                                ],
                            );
                            keys[e] = Some(key);
                            let to_xi = |o: [usize; 3]| -> [f64; 3] {
                                [
                                    (i + o[0]) as f64 / s as f64,
                                    (j + o[1]) as f64 / s as f64,
                                    (k + o[2]) as f64 / s as f64,
                                ]
                            };
                            let xi =
                                polish_edge(&cd, to_xi(oa), to_xi(ob), cv[a], cv[b], axis, tol);
                            piece.verts.push((key, local_to_physical(grid, cell, xi)));
                        }
                        let tri = &tables::TRIANGLE_TABLE[index];
                        let mut q = 0;
                        while tri[q] >= 0 {
                            let es = [tri[q] as usize, tri[q + 1] as usize, tri[q + 2] as usize];
                            if let (Some(k0), Some(k1), Some(k2)) =
                                (keys[es[0]], keys[es[1]], keys[es[2]])
                            {
                                piece.elems.push([k0, k1, k2]);
                            }
                            q += 3;
                        }
                    }
                }
            }
            piece
        });
        let (vertices, triangles) = merge_pieces(pieces, s);
        SurfaceMesh {
            vertices,
            segments: Vec::new(),
            triangles,
            refinement: s,
        }
    }
}

/// Fraction of the box `[lo, hi]` (local coordinates) inside `{H < 0}`,
/// by recursive bisection with a corner-weight estimate at the leaves.
fn box_fraction<const P: usize>(cd: &CellData<P>, lo: [f64; P], hi: [f64; P], depth: usize) -> f64 {
    let nv = 1usize << P;
    let mut corners = [0.0f64; 8];
    for v in 0..nv {
        let mut xi = [0.0; P];
        for i in 0..P {
            xi[i] = if (v >> (P - 1 - i)) & 1 == 1 { hi[i] } else { lo[i] };
        }
        corners[v] = cd.eval(xi, [0; P]);
    }
    let any_in = corners[..nv].iter().any(|&c| inside(c));
    let all_in = corners[..nv].iter().all(|&c| inside(c));
    if all_in {
        return 1.0;
    }
    if !any_in && depth == 0 {
        return 0.0;
    }
    if depth == 0 {
        let neg: f64 = corners[..nv].iter().map(|&c| (-c).max(0.0)).sum();
        let tot: f64 = corners[..nv].iter().map(|&c| c.abs()).sum();
        return if tot > 0.0 { neg / tot } else { 0.5 };
    }
    if !any_in {
        return 0.0;
    }
    let mut acc = 0.0;
    for child in 0..nv {
        let mut clo = lo;
        let mut chi = hi;
        for i in 0..P {
            let mid = 0.5 * (lo[i] + hi[i]);
            if (child >> (P - 1 - i)) & 1 == 1 {
                clo[i] = mid;
            } else {
                chi[i] = mid;
            }
        }
        acc += box_fraction(cd, clo, chi, depth - 1);
    }
    acc / nv as f64
}

/// Volume (3D) / area (2D) / length (1D) of `{H < 0}`: each cell is split
/// into `s^P` subcells; sign-uniform subcells count fully or not at all,
/// and sign-change subcells are refined two more levels before the linear
/// corner estimate.
pub fn measure_volume<const P: usize>(
    state: &LevelSetState<P>,
    s: usize,
    scheme: CrossScheme,
) -> f64 {
    assert!(s >= 1, "refinement must be at least 1");
    let grid = &state.grid;
    let m = s + 1;
    let sub_vol: f64 = (0..P).map(|i| grid.dx[i] / s as f64).product();
    par::sum_indexed(grid.num_cells(), |cidx| {
        let cell = cell_multi_index(grid, cidx);
        let cd = reconstruct_cross(state, cell, scheme);
        let vals = sample_cell(&cd, s);
        let total_sub = s.pow(P as u32);
        let mut acc = 0.0;
        for flat in 0..total_sub {
            let mut sub = [0usize; P];
            let mut rem = flat;
            for i in (0..P).rev() {
                sub[i] = rem % s;
                rem /= s;
            }
            let nv = 1usize << P;
            let mut all_in = true;
            let mut any_in = false;
            for v in 0..nv {
                let mut sample_idx = 0;
                for i in 0..P {
                    sample_idx = sample_idx * m + sub[i] + ((v >> (P - 1 - i)) & 1);
                }
                let c = vals[sample_idx];
                all_in &= inside(c);
                any_in |= inside(c);
            }
            if all_in {
                acc += sub_vol;
            } else if any_in {
                let mut lo = [0.0; P];
                let mut hi = [0.0; P];
                for i in 0..P {
                    lo[i] = sub[i] as f64 / s as f64;
                    hi[i] = (sub[i] + 1) as f64 / s as f64;
                }
                acc += sub_vol * box_fraction(&cd, lo, hi, 2);
            }
        }
        acc
    })
}
