//! CSV and legacy VTK writers.
//!
//! Floats are written with the shortest round-trip representation so the
//! same inputs always give byte-identical files.

use crate::error::Result;
use crate::model::FractureProblem;
use nalgebra::DVector;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Nodal fields of one VTK snapshot.
#[derive(Clone, Debug, Default)]
pub struct VtkFields<'a> {
    pub scalars: Vec<(&'a str, DVector<f64>)>,
    /// Displacement-like coefficient vectors over the free vector DoFs.
    pub vectors: Vec<(&'a str, &'a DVector<f64>)>,
}

/// Legacy ASCII VTK 3.0 unstructured grid with point data.
pub fn vtk_string(p: &FractureProblem, title: &str, fields: &VtkFields<'_>) -> String {
    let mesh = p.mesh();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_nodes());
    for x in mesh.nodes() {
        let _ = writeln!(s, "{} {} 0", f(x[0]), f(x[1]));
    }
    let ne = mesh.n_elements();
    let _ = writeln!(s, "CELLS {} {}", ne, 4 * ne);
    for t in mesh.elements() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {}", mesh.n_nodes());
    for (name, v) in &fields.scalars {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in v.iter() {
            let _ = writeln!(s, "{}", f(*x));
        }
    }
    for (name, u) in &fields.vectors {
        let _ = writeln!(s, "VECTORS {name} double");
        for d in p.dofs().expand(u.as_slice()) {
            let _ = writeln!(s, "{} {} 0", f(d[0]), f(d[1]));
        }
    }
    s
}

pub fn write_vtk(path: &Path, p: &FractureProblem, title: &str, fields: &VtkFields<'_>) -> Result<()> {
    fs::write(path, vtk_string(p, title, fields))?;
    Ok(())
}

/// Extends a Neumann-node field by zero to all mesh nodes.
pub fn boundary_to_nodes(p: &FractureProblem, q: &DVector<f64>) -> DVector<f64> {
    let mut v = DVector::zeros(p.mesh().n_nodes());
    for (k, &n) in p.neumann().nodes.iter().enumerate() {
        v[n] = q[k];
    }
    v
}

/// Writes a CSV file with a header row.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>())?;
    }
    w.flush()?;
    Ok(())
}

/// Formats a float for CSV output: plain notation for moderate
/// magnitudes, scientific otherwise, both round-trip exact.
pub fn f(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
