//! CSV and JSON exchange: lattices, custom weight and symbol data, reports.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::symbols::SampledGrid;
use crate::weights::{PlanarGrid, WeightSpec};
use crate::Real;

/// Writes a header row and numeric rows.
pub fn write_csv<P: AsRef<Path>>(path: P, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Parse(format!("row has {} fields, header has {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(|v| format_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that round-trips, always with a '.' decimal point.
fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// Pretty JSON with a trailing newline.
pub fn write_json<P: AsRef<Path>, S: Serialize + ?Sized>(path: P, value: &S) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads named numeric columns; extra columns are ignored.
fn read_columns<P: AsRef<Path>>(path: P, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let idx = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Parse(format!("{}: missing column `{n}`", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = idx
            .iter()
            .zip(names)
            .map(|(i, n)| {
                let field = rec.get(*i).unwrap_or("");
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{}: row {}: `{field}` in column `{n}` is not a number", path.display(), line + 2))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Columns j, x, y, rho.
pub fn write_lattice_csv<T: Real, P: AsRef<Path>>(path: P, lattice: &Lattice<T>) -> Result<()> {
    let rows = lattice
        .centers
        .iter()
        .zip(&lattice.rhos)
        .enumerate()
        .map(|(j, (a, rho))| vec![j as f64, a.re.as_f64(), a.im.as_f64(), rho.as_f64()]);
    write_csv(path, &["j", "x", "y", "rho"], rows)
}

/// Reads a lattice written by [`write_lattice_csv`]; the invariants are not
/// re-verified here.
pub fn read_lattice_csv<P: AsRef<Path>>(path: P, r: f64, rmax: f64) -> Result<Lattice<f64>> {
    let rows = read_columns(path, &["x", "y", "rho"])?;
    let centers = rows.iter().map(|v| Complex::new(v[0], v[1])).collect();
    let rhos = rows.iter().map(|v| v[2]).collect();
    Lattice::from_parts(r, rmax, centers, rhos)
}

/// Custom radial weight from columns r, laplacian_phi.
pub fn read_radial_weight_csv<P: AsRef<Path>>(path: P) -> Result<WeightSpec<f64>> {
    let rows = read_columns(path, &["r", "laplacian_phi"])?;
    let spec = WeightSpec::CustomRadial {
        radii: rows.iter().map(|v| v[0]).collect(),
        laplacian: rows.iter().map(|v| v[1]).collect(),
    };
    spec.validate()?;
    Ok(spec)
}

/// A full regular grid recovered from scattered (x, y, values) rows.
struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn uniform_axis(axis: &[f64], name: &str) -> Result<f64> {
    if axis.len() < 2 {
        return Err(Error::Parse(format!("grid needs at least two distinct {name} values")));
    }
    let h = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    for (k, v) in axis.iter().enumerate() {
        if (v - (axis[0] + h * k as f64)).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::Parse(format!("{name} values are not uniformly spaced")));
        }
    }
    Ok(h)
}

fn read_grid<P: AsRef<Path>>(path: P, value_cols: &[&str]) -> Result<Grid> {
    let mut names = vec!["x", "y"];
    names.extend_from_slice(value_cols);
    let rows = read_columns(path, &names)?;
    let key = |v: f64| (v * 1e9).round() as i64;
    let mut cells: BTreeMap<(i64, i64), Vec<f64>> = BTreeMap::new();
    let mut xs = BTreeMap::new();
    let mut ys = BTreeMap::new();
    for row in &rows {
        xs.insert(key(row[0]), row[0]);
        ys.insert(key(row[1]), row[1]);
        if cells.insert((key(row[1]), key(row[0])), row[2..].to_vec()).is_some() {
            return Err(Error::Parse(format!("duplicate grid point ({}, {})", row[0], row[1])));
        }
    }
    let xs: Vec<f64> = xs.into_values().collect();
    let ys: Vec<f64> = ys.into_values().collect();
    if cells.len() != xs.len() * ys.len() {
        return Err(Error::Parse(format!("{} points do not fill a {}×{} grid", cells.len(), xs.len(), ys.len())));
    }
    Ok(Grid { xs, ys, values: cells.into_values().collect() })
}

/// Custom planar weight from columns x, y, laplacian_phi on a square grid
/// symmetric about the origin.
pub fn read_planar_weight_csv<P: AsRef<Path>>(path: P) -> Result<WeightSpec<f64>> {
    let g = read_grid(path, &["laplacian_phi"])?;
    uniform_axis(&g.xs, "x")?;
    uniform_axis(&g.ys, "y")?;
    let hw = g.xs[g.xs.len() - 1];
    let symmetric = |axis: &[f64]| (axis[0] + hw).abs() <= 1e-9 * hw.max(1.0) && (axis[axis.len() - 1] - hw).abs() <= 1e-9 * hw.max(1.0);
    if g.xs.len() != g.ys.len() || !symmetric(&g.xs) || !symmetric(&g.ys) {
        return Err(Error::Parse("planar weight grid must be square and span [-w, w]²".into()));
    }
    let spec = WeightSpec::CustomPlanar(PlanarGrid { half_width: hw, n: g.xs.len(), values: g.values.iter().map(|v| v[0]).collect() });
    spec.validate()?;
    Ok(spec)
}

/// Sampled symbol from columns x, y, re_f, im_f on a regular grid.
pub fn read_sampled_symbol_csv<P: AsRef<Path>>(path: P) -> Result<SampledGrid<f64>> {
    let g = read_grid(path, &["re_f", "im_f"])?;
    let dx = uniform_axis(&g.xs, "x")?;
    let dy = uniform_axis(&g.ys, "y")?;
    Ok(SampledGrid {
        x0: g.xs[0],
        y0: g.ys[0],
        dx,
        dy,
        nx: g.xs.len(),
        ny: g.ys.len(),
        values: g.values.iter().map(|v| Complex::new(v[0], v[1])).collect(),
    })
}
