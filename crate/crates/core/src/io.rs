//! CSV, VTK and JSON artifacts.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circle;
use crate::descent::Direction;
use crate::error::{Error, Result};
use crate::fem::FemField;
use crate::gradient::{Form, ShapeGradient};
use crate::mesh::DiskMesh;
use crate::optimizer::IterationRecord;
use crate::radial::RadialShape;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn shape_csv(shape: &RadialShape) -> String {
    let mut s = String::from("phi,f\n");
    for (phi, f) in circle::node_angles(shape.n_nodes()).iter().zip(shape.values()) {
        writeln!(s, "{},{}", fmt_f64(*phi), fmt_f64(*f)).unwrap();
    }
    s
}

pub fn write_shape_csv(path: impl AsRef<Path>, shape: &RadialShape) -> Result<()> {
    write(path.as_ref(), shape_csv(shape))
}

pub fn parse_shape_csv(text: &str) -> Result<RadialShape> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "phi,f" => {}
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `phi,f`, found {:?}", other.map(|o| o.1)),
            })
        }
    }
    let mut values = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(1).ok_or(Error::Parse {
            line: i + 1,
            message: format!("expected `phi,f`, found `{line}`"),
        })?;
        values.push(field.trim().parse::<f64>().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("cannot parse `{field}`"),
        })?);
    }
    RadialShape::new(values)
}

pub fn read_shape_csv(path: impl AsRef<Path>) -> Result<RadialShape> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_shape_csv(&text)
}

pub fn field_csv(field: &FemField) -> String {
    let mut s = String::from("vertex_index,value\n");
    for (i, v) in field.values().iter().enumerate() {
        writeln!(s, "{i},{}", fmt_f64(*v)).unwrap();
    }
    s
}

pub fn gradient_csv(gradient: &ShapeGradient) -> String {
    let angles = circle::node_angles(gradient.n_nodes());
    let mut s = String::new();
    match gradient.form() {
        Form::Volume => {
            s.push_str("phi,h_bar,H_bar\n");
            for ((phi, h), big) in angles.iter().zip(gradient.density()).zip(gradient.flux()) {
                writeln!(s, "{},{},{}", fmt_f64(*phi), fmt_f64(*h), fmt_f64(*big)).unwrap();
            }
        }
        Form::Boundary => {
            s.push_str("phi,xi_bar\n");
            for (phi, xi) in angles.iter().zip(gradient.density()) {
                writeln!(s, "{},{}", fmt_f64(*phi), fmt_f64(*xi)).unwrap();
            }
        }
    }
    s
}

pub fn direction_csv(direction: &Direction) -> String {
    let mut s = String::from("phi,g\n");
    for (phi, g) in circle::node_angles(direction.g.len()).iter().zip(&direction.g) {
        writeln!(s, "{},{}", fmt_f64(*phi), fmt_f64(*g)).unwrap();
    }
    s
}

pub fn energy_csv(records: &[IterationRecord]) -> String {
    let mut s = String::from("iter,energy,deriv,sigma,seconds\n");
    for r in records {
        let sigma = r.sigma.map_or_else(|| "rejected".to_string(), fmt_f64);
        writeln!(
            s,
            "{},{},{},{},{}",
            r.iter,
            fmt_f64(r.energy),
            fmt_f64(r.deriv),
            sigma,
            fmt_f64(r.seconds)
        )
        .unwrap();
    }
    s
}

pub fn write_energy_csv(path: impl AsRef<Path>, records: &[IterationRecord]) -> Result<()> {
    write(path.as_ref(), energy_csv(records))
}

/// Legacy ASCII VTK of the mesh mapped through `Φ_f`.
pub fn deformed_mesh_vtk(mesh: &DiskMesh, shape: &RadialShape) -> String {
    let mut s = String::from("# vtk DataFile Version 3.0\n");
    s.push_str("display mesh: image of the reference disk mesh under the radial map, not the computational mesh\n");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(s, "POINTS {} double", mesh.n_vertices()).unwrap();
    for v in mesh.vertices() {
        let y = shape.map_point(v);
        writeln!(s, "{} {} 0", fmt_f64(y.x), fmt_f64(y.y)).unwrap();
    }
    writeln!(s, "CELLS {} {}", mesh.n_triangles(), 4 * mesh.n_triangles()).unwrap();
    for t in mesh.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "CELL_TYPES {}", mesh.n_triangles()).unwrap();
    for _ in 0..mesh.n_triangles() {
        s.push_str("5\n");
    }
    s
}

pub fn export_deformed_mesh(mesh: &DiskMesh, shape: &RadialShape, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), deformed_mesh_vtk(mesh, shape))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub method: String,
    pub form: String,
    /// Accepted steps.
    pub iterations: usize,
    pub final_energy: f64,
    pub termination: String,
}

pub fn write_summary(path: impl AsRef<Path>, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serialises");
    text.push('\n');
    write(path.as_ref(), text)
}
