//! Continuous P1 space on the active mesh.

use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{barycentric, Point};

/// Global dof numbering: one dof per vertex belonging to at least one
/// active element, in ascending vertex order.
#[derive(Clone, Debug)]
pub struct FeSpace {
    pub dof_of_vertex: Vec<Option<usize>>,
    pub vertex_of_dof: Vec<usize>,
}

impl FeSpace {
    pub fn build(mesh: &TriMesh, cut: &CutTopology) -> Self {
        let mut used = vec![false; mesh.vertices.len()];
        for &t in &cut.active {
            for &v in &mesh.triangles[t].v {
                used[v] = true;
            }
        }
        let mut dof_of_vertex = vec![None; mesh.vertices.len()];
        let mut vertex_of_dof = Vec::new();
        for (v, &u) in used.iter().enumerate() {
            if u {
                dof_of_vertex[v] = Some(vertex_of_dof.len());
                vertex_of_dof.push(v);
            }
        }
        FeSpace {
            dof_of_vertex,
            vertex_of_dof,
        }
    }

    pub fn ndof(&self) -> usize {
        self.vertex_of_dof.len()
    }

    /// Global dofs of the three local basis functions on triangle `t`.
    pub fn element_dofs(&self, mesh: &TriMesh, t: usize) -> [usize; 3] {
        let v = mesh.triangles[t].v;
        [
            self.dof_of_vertex[v[0]].expect("active vertex"),
            self.dof_of_vertex[v[1]].expect("active vertex"),
            self.dof_of_vertex[v[2]].expect("active vertex"),
        ]
    }

    /// Evaluate a coefficient vector at a point inside triangle `t`.
    pub fn eval_in_triangle(
        &self,
        mesh: &TriMesh,
        coeffs: &[f64],
        t: usize,
        p: Point,
    ) -> f64 {
        let dofs = self.element_dofs(mesh, t);
        let l = barycentric(mesh.triangle_points(t), p);
        l[0] * coeffs[dofs[0]] + l[1] * coeffs[dofs[1]] + l[2] * coeffs[dofs[2]]
    }

    /// Constant gradient of a coefficient vector on triangle `t`.
    pub fn gradient_in_triangle(
        &self,
        mesh: &TriMesh,
        coeffs: &[f64],
        t: usize,
    ) -> Point {
        let dofs = self.element_dofs(mesh, t);
        let grads = crate::vec2::p1_gradients(mesh.triangle_points(t));
        let mut g = [0.0, 0.0];
        for k in 0..3 {
            g[0] += coeffs[dofs[k]] * grads[k][0];
            g[1] += coeffs[dofs[k]] * grads[k][1];
        }
        g
    }

    /// Nodal interpolation of a function into the space.
    pub fn interpolate<F: Fn(Point) -> f64>(&self, mesh: &TriMesh, f: F) -> Vec<f64> {
        self.vertex_of_dof
            .iter()
            .map(|&v| f(mesh.vertices[v]))
            .collect()
    }
}
