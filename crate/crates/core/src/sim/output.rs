//! Monitor tables and field snapshots.
//!
//! Monitors are tab-separated: `step t node u_x u_y [u_z]`, one row per
//! monitor per recorded step, with one-based node ids. Snapshots come in two
//! formats: a tab-separated table that round-trips every value exactly, and
//! a legacy ASCII structured-points file for visualisation tools.

use super::config::SnapshotFormat;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRow {
    pub step: usize,
    pub t: f64,
    /// Zero-based node id.
    pub node: usize,
    pub u: [f64; 3],
}

pub fn write_monitors(path: &Path, dim: usize, rows: &[MonitorRow]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let axes = ["u_x", "u_y", "u_z"];
    writeln!(w, "step\tt\tnode\t{}", axes[..dim].join("\t"))?;
    for r in rows {
        write!(w, "{}\t{}\t{}", r.step, r.t, r.node + 1)?;
        for v in &r.u[..dim] {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Snapshot file name for `step`, zero-padded so names sort by step.
pub fn snapshot_name(step: usize, format: SnapshotFormat) -> String {
    match format {
        SnapshotFormat::Tsv => format!("snapshot_{step:07}.tsv"),
        SnapshotFormat::Vtk => format!("snapshot_{step:07}.vtk"),
    }
}

/// Write one snapshot per requested format into `dir`.
pub fn write_snapshot(
    dir: &Path,
    grid: &Grid,
    step: usize,
    u: &VectorField,
    damage: &[f64],
    formats: &[SnapshotFormat],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for &f in formats {
        let path = dir.join(snapshot_name(step, f));
        match f {
            SnapshotFormat::Tsv => write_tsv(&path, grid, u, damage)?,
            SnapshotFormat::Vtk => write_vtk(&path, grid, step, u, damage)?,
        }
        out.push(path);
    }
    Ok(out)
}

pub fn write_tsv(path: &Path, grid: &Grid, u: &VectorField, damage: &[f64]) -> Result<()> {
    let dim = grid.dim();
    let mut w = BufWriter::new(fs::File::create(path)?);
    let idx = ["i", "j", "k"];
    let pos = ["x", "y", "z"];
    let disp = ["u_x", "u_y", "u_z"];
    writeln!(w, "node\t{}\t{}\t{}\tdamage", idx[..dim].join("\t"), pos[..dim].join("\t"), disp[..dim].join("\t"))?;
    let mut line = String::new();
    for p in 0..grid.len() {
        line.clear();
        let ijk = grid.unflat(p);
        let x = grid.position(p);
        write!(line, "{}", p + 1).unwrap();
        for v in &ijk[..dim] {
            write!(line, "\t{}", v + 1).unwrap();
        }
        for v in &x[..dim] {
            write!(line, "\t{v}").unwrap();
        }
        for a in 0..dim {
            write!(line, "\t{}", u.get(a, p)).unwrap();
        }
        writeln!(line, "\t{}", damage[p]).unwrap();
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Displacement and damage read back from a tabular snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub u: VectorField,
    pub damage: Vec<f64>,
}

pub fn read_tsv(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let cols = header.split('\t').count();
    let dim = (cols - 2) / 3;
    let mut comps: Vec<Vec<f64>> = vec![Vec::new(); dim];
    let mut damage = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols {
            return Err(bad(i + 2, "wrong column count"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(i + 2, &e.to_string()));
        for a in 0..dim {
            comps[a].push(num(fields[1 + 2 * dim + a])?);
        }
        damage.push(num(fields[cols - 1])?);
    }
    let n = damage.len();
    let u = VectorField::from_vec(dim, n, comps.concat())?;
    Ok(Snapshot { u, damage })
}

fn bad(line: usize, message: &str) -> Error {
    Error::Parse { line, column: 1, message: message.to_string() }
}

pub fn write_vtk(path: &Path, grid: &Grid, step: usize, u: &VectorField, damage: &[f64]) -> Result<()> {
    let dims = grid.dims();
    let x0 = grid.position(0);
    let h = grid.h();
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "pdfast step {step}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2])?;
    writeln!(w, "ORIGIN {} {} {}", x0[0], x0[1], x0[2])?;
    writeln!(w, "SPACING {h} {h} {h}")?;
    writeln!(w, "POINT_DATA {}", grid.len())?;
    writeln!(w, "VECTORS displacement double")?;
    for p in 0..grid.len() {
        let v = u.node(p);
        writeln!(w, "{} {} {}", v[0], v[1], v[2])?;
    }
    writeln!(w, "SCALARS damage double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for d in damage {
        writeln!(w, "{d}")?;
    }
    w.flush()?;
    Ok(())
}
