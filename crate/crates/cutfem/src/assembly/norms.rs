//! Discrete energy norm and the true-error seminorm for benchmarks with a
//! known exact solution.

use crate::assembly::space::FeSpace;
use crate::error::EstimatorError;
use crate::estimator::bc_mesh::BcMesh;
use crate::geometry::quadrature::{quadrature_polygon, quadrature_segment};
use crate::geometry::ElementClass;
use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{dot, sub, Point};

/// Exact-solution callback: `(u, grad u)` at a point.
pub type ExactFn<'a> = &'a dyn Fn(Point) -> (f64, Point);

/// Discrete energy norm of a coefficient vector:
/// gradient seminorm over the approximate domain plus weighted boundary
/// flux and trace terms on the cut elements.
pub fn discrete_energy_norm(
    coeffs: &[f64],
    mesh: &TriMesh,
    cut: &CutTopology,
    space: &FeSpace,
) -> f64 {
    let mut total = 0.0;

    for (k, &t) in cut.active.iter().enumerate() {
        let clip = &cut.clips[k];
        let area = clip.inside_area();
        let grad = space.gradient_in_triangle(mesh, coeffs, t);
        total += dot(grad, grad) * area;

        if clip.class == ElementClass::Cut {
            if let Some(seg) = &clip.boundary_segment {
                let h_k = mesh.diameter(t);
                let dn = dot(seg.normal, grad);
                total += h_k * dn * dn * seg.length();
                let rule =
                    quadrature_segment(seg.a, seg.b, 3).expect("segment quadrature");
                let mut trace = 0.0;
                for q in &rule {
                    let v = space.eval_in_triangle(mesh, coeffs, t, q.point);
                    trace += q.weight * v * v;
                }
                total += trace / h_k;
            }
        }
    }
    total.sqrt()
}

/// Gradient seminorm of `u - u_h` restricted to the physical domain, used
/// as the true error in convergence studies. Inside elements integrate over
/// the whole triangle; cut elements integrate over the boundary-correction
/// sub-triangles, which triangulate the physical part of the element.
pub fn energy_error(
    coeffs: &[f64],
    exact: Option<ExactFn>,
    mesh: &TriMesh,
    cut: &CutTopology,
    space: &FeSpace,
    bc: &BcMesh,
) -> Result<f64, EstimatorError> {
    let exact = exact.ok_or(EstimatorError::MissingExactSolution)?;
    let mut total = 0.0;

    for (k, &t) in cut.active.iter().enumerate() {
        let clip = &cut.clips[k];
        let grad_h = space.gradient_in_triangle(mesh, coeffs, t);
        match clip.class {
            ElementClass::Inside => {
                let pts = mesh.triangle_points(t);
                let rule = quadrature_polygon(&pts, 5).expect("volume quadrature");
                for q in &rule {
                    let (_, gu) = exact(q.point);
                    let d = sub(gu, grad_h);
                    total += q.weight * dot(d, d);
                }
            }
            ElementClass::Cut => {
                for tri in bc.triangles_of(t) {
                    let pts = bc.triangle_points(tri);
                    let rule = quadrature_polygon(&pts, 5).expect("volume quadrature");
                    for q in &rule {
                        let (_, gu) = exact(q.point);
                        let d = sub(gu, grad_h);
                        total += q.weight * dot(d, d);
                    }
                }
            }
            ElementClass::Outside => unreachable!("outside elements are not active"),
        }
    }
    Ok(total.sqrt())
}
