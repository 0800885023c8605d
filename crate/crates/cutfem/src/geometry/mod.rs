//! Level-set geometry: domain representation, nodal interpolation, cut-cell
//! classification, clipping and quadrature.

pub mod clip;
pub mod defect;
pub mod level_set;
pub mod quadrature;

pub use clip::{classify_and_clip, BoundarySegment, ClipResult, ElementClass};
pub use defect::{boundary_defect, BoundaryDefect};
pub use level_set::{LevelSet, LevelSetExpr};
pub use quadrature::{integrate, quadrature_polygon, quadrature_segment, QuadPoint};

use crate::error::GeometryError;
use crate::mesh::tri_mesh::TriMesh;

/// One scalar per mesh vertex; the piecewise-linear extension over the mesh
/// is the approximate level set whose zero set defines the discrete domain.
#[derive(Clone, Debug)]
pub struct NodalField {
    pub values: Vec<f64>,
    mesh_id: u64,
}

impl NodalField {
    pub fn new(values: Vec<f64>, mesh: &TriMesh) -> Self {
        assert_eq!(values.len(), mesh.vertices.len());
        NodalField {
            values,
            mesh_id: mesh.id(),
        }
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    /// Evaluate the piecewise-linear extension inside triangle `t`.
    pub fn eval_in_triangle(&self, mesh: &TriMesh, t: usize, p: crate::vec2::Point) -> f64 {
        let tri = &mesh.triangles[t];
        let l = crate::vec2::barycentric(mesh.triangle_points(t), p);
        l[0] * self.values[tri.v[0]] + l[1] * self.values[tri.v[1]] + l[2] * self.values[tri.v[2]]
    }
}

/// Nodal interpolation of the level set on the mesh vertices.
pub fn interpolate_levelset(
    phi: &LevelSet,
    mesh: &TriMesh,
) -> Result<NodalField, GeometryError> {
    let mut values = Vec::with_capacity(mesh.vertices.len());
    for (v, &p) in mesh.vertices.iter().enumerate() {
        let val = phi.evaluate(p);
        if !val.is_finite() {
            return Err(GeometryError::NonFiniteLevelSet {
                vertex: v,
                x: p[0],
                y: p[1],
            });
        }
        values.push(val);
    }
    Ok(NodalField::new(values, mesh))
}
