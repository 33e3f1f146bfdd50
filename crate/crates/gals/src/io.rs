//! Artifact writers (CSV, OBJ, legacy ASCII VTK) and the plain-text
//! level set state file used by the `extract` subcommand.
//!
//! All floating-point output uses scientific notation with 17 significant
//! digits and a `.` decimal separator, so round-tripping through text is
//! exact for f64 and identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{GalsError, Result};
use crate::geometry::SurfaceMesh;
use crate::grid::{Grid, LevelSetState};
use crate::stability::ScanResult;

/// Scientific notation with 17 significant digits (round-trip exact).
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Generic CSV writer: one header row, then `fmt_sci`-formatted values.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sci(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// 2D contour as CSV polylines: columns `component,x,y`, one row per
/// vertex, consecutive rows of one component forming the polyline.
pub fn write_contour_csv(path: &Path, mesh: &SurfaceMesh<2>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "component,x,y")?;
    for (ci, chain) in mesh.polylines().iter().enumerate() {
        for &v in chain {
            let p = mesh.vertices[v];
            writeln!(w, "{},{},{}", ci, fmt_sci(p[0]), fmt_sci(p[1]))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Wavefront OBJ triangle mesh (1-based indices).
pub fn write_obj(path: &Path, mesh: &SurfaceMesh<3>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt_sci(v[0]), fmt_sci(v[1]), fmt_sci(v[2]))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK polydata: triangles in 3D, line segments in 2D
/// (2D points padded with z = 0).
pub fn write_vtk_polydata<const P: usize>(path: &Path, mesh: &SurfaceMesh<P>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "level set contour")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {} double", mesh.vertices.len())?;
    for v in &mesh.vertices {
        let mut coords = [0.0; 3];
        coords[..P].copy_from_slice(v);
        writeln!(
            w,
            "{} {} {}",
            fmt_sci(coords[0]),
            fmt_sci(coords[1]),
            fmt_sci(coords[2])
        )?;
    }
    if !mesh.triangles.is_empty() {
        writeln!(w, "POLYGONS {} {}", mesh.triangles.len(), 4 * mesh.triangles.len())?;
        for t in &mesh.triangles {
            writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
        }
    } else if !mesh.segments.is_empty() {
        writeln!(w, "LINES {} {}", mesh.segments.len(), 3 * mesh.segments.len())?;
        for s in &mesh.segments {
            writeln!(w, "2 {} {}", s[0], s[1])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Stability scan table, one row per (ξ, θ) sample.
pub fn write_stability_csv(path: &Path, scan: &ScanResult) -> Result<()> {
    let header = [
        "xi",
        "theta",
        "re_lambda1",
        "im_lambda1",
        "abs_lambda1",
        "re_lambda2",
        "im_lambda2",
        "abs_lambda2",
    ];
    let rows: Vec<Vec<f64>> = scan
        .rows
        .iter()
        .map(|r| {
            vec![
                r.xi,
                r.theta,
                r.lambda1.re,
                r.lambda1.im,
                r.lambda1.norm(),
                r.lambda2.re,
                r.lambda2.im,
                r.lambda2.norm(),
            ]
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// A level set state read back from disk, with the dimension resolved
/// at runtime.
pub enum StoredState {
    D2(LevelSetState<2>),
    D3(LevelSetState<3>),
}

/// Write a state as a plain-text file: a small header (dimension, bounds,
/// cell counts, time), then one row per node with φ followed by the ψ
/// components, in `node_index` order.
pub fn write_state<const P: usize>(path: &Path, state: &LevelSetState<P>) -> Result<()> {
    let g = &state.grid;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "gals-state 1")?;
    writeln!(w, "dim {P}")?;
    let join = |v: &[f64]| v.iter().map(|&x| fmt_sci(x)).collect::<Vec<_>>().join(" ");
    writeln!(w, "lower {}", join(&g.lower))?;
    writeln!(w, "upper {}", join(&g.upper))?;
    writeln!(
        w,
        "nodes {}",
        g.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
    )?;
    writeln!(w, "time {}", fmt_sci(state.t))?;
    writeln!(w, "data")?;
    for i in 0..g.num_nodes() {
        let mut row = vec![state.phi[i]];
        row.extend_from_slice(&state.psi[i]);
        writeln!(w, "{}", join(&row))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(context: &str, message: impl Into<String>) -> GalsError {
    GalsError::Parse { context: context.to_string(), message: message.into() }
}

fn parse_floats(context: &str, s: &str, n: usize) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> =
        s.split_whitespace().map(str::parse::<f64>).collect();
    let vals = vals.map_err(|e| parse_err(context, e.to_string()))?;
    if vals.len() != n {
        return Err(parse_err(context, format!("expected {n} values, got {}", vals.len())));
    }
    Ok(vals)
}

fn read_state_p<const P: usize>(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
) -> Result<LevelSetState<P>> {
    let ctx = "state file";
    let mut lower = None;
    let mut upper = None;
    let mut nodes = None;
    let mut time = 0.0;
    loop {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(ctx, "truncated header"))??;
        let line = line.trim();
        if line == "data" {
            break;
        }
        let (key, rest) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(ctx, format!("bad header line: {line}")))?;
        match key {
            "lower" => {
                let v = parse_floats(ctx, rest, P)?;
                let mut a = [0.0; P];
                a.copy_from_slice(&v);
                lower = Some(a);
            }
            "upper" => {
                let v = parse_floats(ctx, rest, P)?;
                let mut a = [0.0; P];
                a.copy_from_slice(&v);
                upper = Some(a);
            }
            "nodes" => {
                let v: std::result::Result<Vec<usize>, _> =
                    rest.split_whitespace().map(str::parse).collect();
                let v = v.map_err(|e| parse_err(ctx, e.to_string()))?;
                if v.len() != P {
                    return Err(parse_err(ctx, "node count dimension mismatch"));
                }
                let mut a = [0usize; P];
                a.copy_from_slice(&v);
                nodes = Some(a);
            }
            "time" => {
                time = rest
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| parse_err(ctx, e.to_string()))?;
            }
            other => return Err(parse_err(ctx, format!("unknown header key: {other}"))),
        }
    }
    let lower = lower.ok_or_else(|| parse_err(ctx, "missing lower bound"))?;
    let upper = upper.ok_or_else(|| parse_err(ctx, "missing upper bound"))?;
    let nodes = nodes.ok_or_else(|| parse_err(ctx, "missing node counts"))?;
    let grid = Grid::<P>::new(lower, upper, nodes)?;
    let nn = grid.num_nodes();
    let mut phi = Vec::with_capacity(nn);
    let mut psi = Vec::with_capacity(nn);
    for _ in 0..nn {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(ctx, "truncated node data"))??;
        let v = parse_floats(ctx, &line, 1 + P)?;
        phi.push(v[0]);
        let mut g = [0.0; P];
        g.copy_from_slice(&v[1..]);
        psi.push(g);
    }
    LevelSetState::new(grid, phi, psi, time)
}

/// Read a state file, resolving the dimension from its header.
pub fn read_state(path: &Path) -> Result<StoredState> {
    let ctx = "state file";
    let mut lines = BufReader::new(File::open(path)?).lines();
    let magic = lines
        .next()
        .ok_or_else(|| parse_err(ctx, "empty file"))??;
    if magic.trim() != "gals-state 1" {
        return Err(parse_err(ctx, "not a level set state file"));
    }
    let dim_line = lines
        .next()
        .ok_or_else(|| parse_err(ctx, "missing dimension"))??;
    match dim_line.trim() {
        "dim 2" => Ok(StoredState::D2(read_state_p::<2>(&mut lines)?)),
        "dim 3" => Ok(StoredState::D3(read_state_p::<3>(&mut lines)?)),
        other => Err(parse_err(ctx, format!("unsupported dimension line: {other}"))),
    }
}
