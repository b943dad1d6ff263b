//! CSV and JSON export of fields, controls and tables, plus plot scripts.
//!
//! Every number is written with 17 significant digits (`{:.16e}`), so a
//! field read back from its CSV is bit-identical to the one written.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::control::SynthesizedControl;
use crate::error::{Error, Result};
use crate::field::{GridSpec, HalfPlaneField, PhysicalField};
use crate::simulation::CounterexampleReport;

/// Vertical section of the difference field: `x2` fixed, `x1` varies.
pub const SECTION_X2: f64 = -3.0;
/// Horizontal section: `x1` fixed, `x2` varies.
pub const SECTION_X1: f64 = 2.2;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_rows<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = create(path)?;
    writeln!(w, "{header}").map_err(|e| Error::io(path, e))?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

/// `x1,x2,value` rows, row-major in `x1`.
pub fn write_field_csv(path: impl AsRef<Path>, field: &PhysicalField) -> Result<()> {
    let g = *field.grid();
    let x2 = g.x2_coords();
    let v = field.values();
    write_rows(
        path.as_ref(),
        "x1,x2,value",
        (0..g.n1).flat_map(|i| {
            let x2 = &x2;
            (0..g.n2).map(move |j| vec![g.x1(i), x2[j], v[[i, j]]])
        }),
    )
}

/// Rows of the right half plane only.
pub fn write_half_plane_csv(path: impl AsRef<Path>, field: &HalfPlaneField) -> Result<()> {
    let g = *field.grid();
    let half = g.n1 / 2;
    let x2 = g.x2_coords();
    let v = field.values();
    write_rows(
        path.as_ref(),
        "x1,x2,value",
        (0..half).flat_map(|i| {
            let x2 = &x2;
            (0..g.n2).map(move |j| vec![g.x1(half + i), x2[j], v[[i, j]]])
        }),
    )
}

#[derive(Debug, Deserialize)]
struct Sample {
    x1: f64,
    x2: f64,
    value: f64,
}

fn coord_matches(a: f64, b: f64, h: f64) -> bool {
    (a - b).abs() <= 1e-9 * h.max(1.0)
}

fn read_samples(path: &Path) -> Result<Vec<Sample>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    })?;
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Reads samples written by [`write_half_plane_csv`] for `grid`. Rows must
/// appear in the same order and at the grid's cell centres.
pub fn read_half_plane_csv(path: impl AsRef<Path>, grid: &GridSpec) -> Result<HalfPlaneField> {
    let path = path.as_ref();
    grid.validate()?;
    let samples = read_samples(path)?;
    let half = grid.n1 / 2;
    let expected = half * grid.n2;
    if samples.len() != expected {
        return Err(Error::Shape {
            expected: format!("{expected} half-plane rows"),
            actual: format!("{}", samples.len()),
        });
    }
    let x2 = grid.x2_coords();
    let mut values = Array2::zeros((half, grid.n2));
    for (k, s) in samples.iter().enumerate() {
        let (i, j) = (k / grid.n2, k % grid.n2);
        if !coord_matches(s.x1, grid.x1(half + i), grid.h1()) || !coord_matches(s.x2, x2[j], grid.h2()) {
            return Err(Error::Format(format!(
                "{}: row {} at ({}, {}) is not grid point ({}, {})",
                path.display(),
                k + 2,
                s.x1,
                s.x2,
                grid.x1(half + i),
                x2[j]
            )));
        }
        values[[i, j]] = s.value;
    }
    HalfPlaneField::new(*grid, values)
}

/// Reads a full-grid field written by [`write_field_csv`].
pub fn read_field_csv(path: impl AsRef<Path>, grid: &GridSpec, time_tag: f64) -> Result<PhysicalField> {
    let path = path.as_ref();
    let samples = read_samples(path)?;
    let expected = grid.n1 * grid.n2;
    if samples.len() != expected {
        return Err(Error::Shape {
            expected: format!("{expected} rows"),
            actual: format!("{}", samples.len()),
        });
    }
    let x2 = grid.x2_coords();
    let mut values = Array2::zeros((grid.n1, grid.n2));
    for (k, s) in samples.iter().enumerate() {
        let (i, j) = (k / grid.n2, k % grid.n2);
        if !coord_matches(s.x1, grid.x1(i), grid.h1()) || !coord_matches(s.x2, x2[j], grid.h2()) {
            return Err(Error::Format(format!("{}: row {} off grid", path.display(), k + 2)));
        }
        values[[i, j]] = s.value;
    }
    PhysicalField::new(*grid, values, time_tag)
}

/// Sidecar describing a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldManifest {
    pub grid: GridSpec,
    pub time_tag: f64,
    pub norm: f64,
    pub csv: PathBuf,
}

impl FieldManifest {
    pub fn describe(field: &PhysicalField, csv: impl Into<PathBuf>) -> Self {
        Self {
            grid: *field.grid(),
            time_tag: field.time_tag(),
            norm: field.l2_norm(),
            csv: csv.into(),
        }
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(w, path)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
pub fn write_field_with_manifest(dir: impl AsRef<Path>, stem: &str, field: &PhysicalField) -> Result<FieldManifest> {
    let dir = dir.as_ref();
    let csv_name = format!("{stem}.csv");
    write_field_csv(dir.join(&csv_name), field)?;
    let manifest = FieldManifest::describe(field, csv_name);
    write_json(dir.join(format!("{stem}.json")), &manifest)?;
    Ok(manifest)
}

/// `x2,xi,u` on the tensor grid of the given samples.
pub fn write_control_csv(path: impl AsRef<Path>, control: &SynthesizedControl, x2: &[f64], xi: &[f64]) -> Result<()> {
    let mut rows = Vec::with_capacity(x2.len() * xi.len());
    for &t in xi {
        for (&y, u) in x2.iter().zip(control.profile(x2, t)?) {
            rows.push(vec![y, t, u]);
        }
    }
    write_rows(path.as_ref(), "x2,xi,u", rows)
}

/// Uniform samples on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn bracket(coord: f64, lo: f64, h: f64, n: usize) -> Result<(usize, f64)> {
    let s = (coord - lo) / h - 0.5;
    if !(s >= 0.0 && s <= (n - 1) as f64) {
        return Err(Error::Parameter(format!("section coordinate {coord} outside the grid")));
    }
    let i0 = (s.floor() as usize).min(n - 2);
    Ok((i0, s - i0 as f64))
}

/// `(x1, W(x1, x2))` along a fixed `x2`, linearly interpolated in `x2`.
pub fn section_at_x2(field: &PhysicalField, x2: f64) -> Result<Vec<(f64, f64)>> {
    let g = *field.grid();
    let (j0, f) = bracket(x2, -g.halfwidth_x2, g.h2(), g.n2)?;
    let v = field.values();
    Ok((0..g.n1)
        .map(|i| (g.x1(i), v[[i, j0]] + f * (v[[i, j0 + 1]] - v[[i, j0]])))
        .collect())
}

/// `(x2, W(x1, x2))` along a fixed `x1`, linearly interpolated in `x1`.
pub fn section_at_x1(field: &PhysicalField, x1: f64) -> Result<Vec<(f64, f64)>> {
    let g = *field.grid();
    let (i0, f) = bracket(x1, -g.halfwidth_x1, g.h1(), g.n1)?;
    let v = field.values();
    Ok((0..g.n2)
        .map(|j| (g.x2(j), v[[i0, j]] + f * (v[[i0 + 1, j]] - v[[i0, j]])))
        .collect())
}

pub fn write_section_csv(path: impl AsRef<Path>, header: &str, section: &[(f64, f64)]) -> Result<()> {
    write_rows(path.as_ref(), header, section.iter().map(|&(a, b)| vec![a, b]))
}

/// Columns `target,state,difference` along both standard sections.
pub fn write_sections(dir: impl AsRef<Path>, target: &PhysicalField, state: &PhysicalField) -> Result<()> {
    let dir = dir.as_ref();
    let diff = target.sub(state)?;
    let triples = |a: Vec<(f64, f64)>, b: Vec<(f64, f64)>, c: Vec<(f64, f64)>| {
        a.into_iter()
            .zip(b)
            .zip(c)
            .map(|((p, q), r)| vec![p.0, p.1, q.1, r.1])
            .collect::<Vec<_>>()
    };
    let v = triples(
        section_at_x2(target, SECTION_X2)?,
        section_at_x2(state, SECTION_X2)?,
        section_at_x2(&diff, SECTION_X2)?,
    );
    write_rows(&dir.join("section_x2.csv"), "x1,target,state,difference", v)?;
    let h = triples(
        section_at_x1(target, SECTION_X1)?,
        section_at_x1(state, SECTION_X1)?,
        section_at_x1(&diff, SECTION_X1)?,
    );
    write_rows(&dir.join("section_x1.csv"), "x2,target,state,difference", h)
}

pub fn write_counterexample_csv(path: impl AsRef<Path>, report: &CounterexampleReport) -> Result<()> {
    write_rows(
        path.as_ref(),
        "level,inner_radius,norm,increment",
        report
            .rows
            .iter()
            .map(|r| vec![r.level as f64, r.inner_radius, r.norm, r.increment]),
    )
}

const DIFFERENCE_SCRIPT: &str = r#"import sys
import numpy as np
import matplotlib.pyplot as plt

d = np.loadtxt("difference.csv", delimiter=",", skiprows=1)
x1, x2 = np.unique(d[:, 0]), np.unique(d[:, 1])
v = d[:, 2].reshape(len(x1), len(x2))
m = (np.abs(x1) <= 10)[:, None] & (np.abs(x2) <= 10)[None, :]
fig, ax = plt.subplots(figsize=(6, 5))
im = ax.pcolormesh(x2[np.abs(x2) <= 10], x1[np.abs(x1) <= 10],
                   v[np.ix_(np.abs(x1) <= 10, np.abs(x2) <= 10)], shading="auto", cmap="RdBu_r")
fig.colorbar(im, ax=ax)
ax.set_xlabel("x2")
ax.set_ylabel("x1")
ax.set_title("target minus terminal state")
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "difference.png", dpi=150)
"#;

const SECTIONS_SCRIPT: &str = r#"import sys
import numpy as np
import matplotlib.pyplot as plt

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for ax, name, label in [(axes[0], "section_x2.csv", "x1 (x2 = -3)"),
                        (axes[1], "section_x1.csv", "x2 (x1 = 2.2)")]:
    d = np.loadtxt(name, delimiter=",", skiprows=1)
    keep = np.abs(d[:, 0]) <= 10
    ax.plot(d[keep, 0], d[keep, 1], label="target")
    ax.plot(d[keep, 0], d[keep, 2], "--", label="terminal state")
    ax.plot(d[keep, 0], d[keep, 3], ":", label="difference")
    ax.set_xlabel(label)
    ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "sections.png", dpi=150)
"#;

const CONTROL_SCRIPT: &str = r#"import sys
import numpy as np
import matplotlib.pyplot as plt

d = np.loadtxt("control.csv", delimiter=",", skiprows=1)
x2, xi = np.unique(d[:, 0]), np.unique(d[:, 1])
u = d[:, 2].reshape(len(xi), len(x2))
fig, ax = plt.subplots(figsize=(6, 5))
im = ax.pcolormesh(x2, xi, u, shading="auto", cmap="RdBu_r")
fig.colorbar(im, ax=ax)
ax.set_xlabel("x2")
ax.set_ylabel("time")
ax.set_title("boundary control u(x2, t)")
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "control.png", dpi=150)
"#;

/// Writes `plot_difference.py`, `plot_sections.py` and `plot_control.py`
/// into `dir`; each reads CSVs from its working directory.
pub fn write_plot_scripts(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for (name, body) in [
        ("plot_difference.py", DIFFERENCE_SCRIPT),
        ("plot_sections.py", SECTIONS_SCRIPT),
        ("plot_control.py", CONTROL_SCRIPT),
    ] {
        let path = dir.join(name);
        let mut w = create(&path)?;
        w.write_all(body.as_bytes()).map_err(|e| Error::io(&path, e))?;
        finish(w, &path)?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_plane_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::square(8.0, 16).unwrap();
        let f = HalfPlaneField::from_fn(grid, |a, b| (a * 1.3).sin() * (-b * b / 7.0).exp() / 3.0).unwrap();
        let path = dir.path().join("w.csv");
        write_half_plane_csv(&path, &f).unwrap();
        let back = read_half_plane_csv(&path, &grid).unwrap();
        assert_eq!(back.values(), f.values());
        let other = GridSpec::square(9.0, 16).unwrap();
        assert!(read_half_plane_csv(&path, &other).is_err());
    }

    #[test]
    fn sections_interpolate_linear_fields_exactly() {
        let grid = GridSpec::square(8.0, 32).unwrap();
        let f = PhysicalField::from_fn(grid, 0.0, |a, b| 2.0 * a - 0.5 * b).unwrap();
        for (x1, v) in section_at_x2(&f, SECTION_X2).unwrap() {
            assert!((v - (2.0 * x1 + 1.5)).abs() < 1e-12);
        }
        for (x2, v) in section_at_x1(&f, SECTION_X1).unwrap() {
            assert!((v - (4.4 - 0.5 * x2)).abs() < 1e-12);
        }
        assert!(section_at_x1(&f, 50.0).is_err());
    }
}
