//! CSV, JSON and OBJ writers. Floats are written with 17 significant digits.

use super::immersion::{mean_curvature_residual, mt_residual, Immersion};
use super::shadow::ShadowSurface;
use crate::error::{Error, Result};
use crate::sphere::{Grid, ScalarField};
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Full-precision float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let to_io = |e: csv::Error| std::io::Error::from(e);
    w.write_record(header)
        .map_err(to_io)
        .map_err(io_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(to_io).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One row per node: `u, v, ν₁, ν₂, ν₃, weight, value`.
pub fn write_field_csv(field: &ScalarField, path: &Path) -> Result<()> {
    let rows = field
        .grid()
        .nodes()
        .iter()
        .zip(field.values())
        .map(|(n, v)| {
            vec![
                fmt_f64(n.chart.u),
                fmt_f64(n.chart.v),
                fmt_f64(n.sphere.nu[0]),
                fmt_f64(n.sphere.nu[1]),
                fmt_f64(n.sphere.nu[2]),
                fmt_f64(n.weight),
                fmt_f64(*v),
            ]
        });
    write_csv(
        path,
        &["u", "v", "nu1", "nu2", "nu3", "weight", "value"],
        rows,
    )
}

fn grid_metadata(grid: &Grid) -> serde_json::Value {
    json!({
        "theta0": grid.domain().theta0(),
        "nr": grid.nr(),
        "ntheta": grid.ntheta(),
        "stereo_radius": grid.radius(),
    })
}

/// Metadata header plus node arrays.
pub fn field_json(field: &ScalarField) -> serde_json::Value {
    let nodes = field.grid().nodes();
    json!({
        "grid": grid_metadata(field.grid()),
        "u": nodes.iter().map(|n| n.chart.u).collect::<Vec<_>>(),
        "v": nodes.iter().map(|n| n.chart.v).collect::<Vec<_>>(),
        "weight": nodes.iter().map(|n| n.weight).collect::<Vec<_>>(),
        "value": field.values(),
    })
}

/// `u, v, Y1..Y4, density, mc_residual, mt_residual, degenerate`; residual
/// columns are empty on degenerate nodes.
pub fn write_immersion_csv(imm: &Immersion, path: &Path) -> Result<()> {
    let mc = mean_curvature_residual(imm);
    let mt = mt_residual(imm);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let nodes = imm.field().grid().nodes();
    let rows = imm.samples().iter().enumerate().map(|(n, s)| {
        vec![
            fmt_f64(nodes[n].chart.u),
            fmt_f64(nodes[n].chart.v),
            fmt_f64(s.y.0[0]),
            fmt_f64(s.y.0[1]),
            fmt_f64(s.y.0[2]),
            fmt_f64(s.y.0[3]),
            fmt_f64(s.density),
            opt(mc.values[n]),
            opt(mt.values[n]),
            u8::from(s.degenerate).to_string(),
        ]
    });
    write_csv(
        path,
        &[
            "u",
            "v",
            "Y1",
            "Y2",
            "Y3",
            "Y4",
            "density",
            "mc_residual",
            "mt_residual",
            "degenerate",
        ],
        rows,
    )
}

/// Triangles of the polar tensor grid (1-based OBJ indices): quads between
/// consecutive rings split in two, and a fan closing the innermost ring.
pub fn grid_triangles(grid: &Grid) -> Vec<[usize; 3]> {
    let (nr, nt) = (grid.nr(), grid.ntheta());
    let mut tris = Vec::with_capacity(2 * nr * nt);
    for k in 1..nt - 1 {
        tris.push([1, k + 1, k + 2]);
    }
    for j in 0..nr - 1 {
        for k in 0..nt {
            let a = grid.index(j, k) + 1;
            let b = grid.index(j, (k + 1) % nt) + 1;
            let c = grid.index(j + 1, (k + 1) % nt) + 1;
            let d = grid.index(j + 1, k) + 1;
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    tris
}

pub fn write_shadow_obj(shadow: &ShadowSurface, grid: &Grid, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut body = String::new();
    body.push_str(&format!(
        "# shadow surface, {} x {} grid\n",
        grid.nr(),
        grid.ntheta()
    ));
    for p in &shadow.points {
        body.push_str(&format!(
            "v {} {} {}\n",
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2])
        ));
    }
    for t in grid_triangles(grid) {
        body.push_str(&format!("f {} {} {}\n", t[0], t[1], t[2]));
    }
    w.write_all(body.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}
