//! CSV convergence records and VTK legacy mesh snapshots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::amr::AmrRecord;
use crate::geometry::ElementClass;
use crate::mesh::{CutTopology, TriMesh};

pub const CSV_HEADER: &str = "step,ndof,eta,eta_residual,eta_jump,eta_nitsche,eta_bc,\
true_error,effectivity,osc,cg_iters,cond_est,wall_s";

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), fmt_f64)
}

/// Render the convergence table; fixed column order, decimal-dot floats.
pub fn render_csv(records: &[AmrRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.ndof,
            fmt_f64(r.eta),
            fmt_f64(r.eta_residual),
            fmt_f64(r.eta_jump),
            fmt_f64(r.eta_nitsche),
            fmt_f64(r.eta_bc),
            fmt_opt(r.true_error),
            fmt_opt(r.effectivity),
            fmt_f64(r.osc),
            r.cg_iters,
            fmt_f64(r.cond_est),
            fmt_f64(r.wall_s),
        );
    }
    out
}

pub fn write_csv(path: &Path, records: &[AmrRecord]) -> std::io::Result<()> {
    fs::write(path, render_csv(records))
}

/// Per-element scalar fields attached to a VTK snapshot.
pub struct VtkCellData<'a> {
    pub name: &'a str,
    pub values: Vec<f64>,
}

/// Render a mesh with cell data as VTK legacy ASCII (version 3.0,
/// unstructured grid of triangles).
pub fn render_vtk(title: &str, mesh: &TriMesh, cell_data: &[VtkCellData]) -> String {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "{title}");
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");

    let _ = writeln!(out, "POINTS {} double", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(out, "{} {} 0", fmt_f64(v[0]), fmt_f64(v[1]));
    }

    let n = mesh.triangles.len();
    let _ = writeln!(out, "CELLS {} {}", n, 4 * n);
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t.v[0], t.v[1], t.v[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {n}");
    for _ in 0..n {
        out.push_str("5\n");
    }

    if !cell_data.is_empty() {
        let _ = writeln!(out, "CELL_DATA {n}");
        for field in cell_data {
            assert_eq!(field.values.len(), n, "cell data length mismatch");
            let _ = writeln!(out, "SCALARS {} double 1", field.name);
            out.push_str("LOOKUP_TABLE default\n");
            for v in &field.values {
                let _ = writeln!(out, "{}", fmt_f64(*v));
            }
        }
    }
    out
}

/// Standard snapshot fields: classification (0 inside, 1 cut, 2 outside)
/// and the indicator with its components, zero on inactive elements.
pub fn snapshot_cell_data(
    mesh: &TriMesh,
    cut: &CutTopology,
    indicators: &crate::estimator::IndicatorField,
) -> Vec<VtkCellData<'static>> {
    let n = mesh.triangles.len();
    let mut classification = vec![2.0; n];
    let mut eta = vec![0.0; n];
    let mut eta_residual = vec![0.0; n];
    let mut eta_jump = vec![0.0; n];
    let mut eta_nitsche = vec![0.0; n];
    let mut eta_bc = vec![0.0; n];
    for (k, &t) in cut.active.iter().enumerate() {
        classification[t] = match cut.clips[k].class {
            ElementClass::Inside => 0.0,
            ElementClass::Cut => 1.0,
            ElementClass::Outside => 2.0,
        };
        eta[t] = indicators.eta_k[k];
        eta_residual[t] = indicators.residual_sq[k].sqrt();
        eta_jump[t] = indicators.jump_sq[k].sqrt();
        eta_nitsche[t] = indicators.nitsche_sq[k].sqrt();
        eta_bc[t] = indicators.bc_sq[k].sqrt();
    }
    vec![
        VtkCellData {
            name: "classification",
            values: classification,
        },
        VtkCellData {
            name: "eta",
            values: eta,
        },
        VtkCellData {
            name: "eta_residual",
            values: eta_residual,
        },
        VtkCellData {
            name: "eta_jump",
            values: eta_jump,
        },
        VtkCellData {
            name: "eta_nitsche",
            values: eta_nitsche,
        },
        VtkCellData {
            name: "eta_bc",
            values: eta_bc,
        },
    ]
}
