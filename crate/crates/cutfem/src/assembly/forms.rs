//! Assembly of the cut finite element bilinear and linear forms.
//!
//! The bilinear form is the Nitsche form on the approximate domain plus the
//! ghost penalty: volume terms are integrated over the clipped part of each
//! active element, boundary terms over the straight boundary segment of each
//! cut element with the `beta / h_K` penalty weight, and the ghost penalty
//! integrates normal-derivative jumps over entire ghost facets scaled by
//! `gamma * h_F`.

use crate::assembly::sparse::CsrMatrix;
use crate::assembly::space::FeSpace;
use crate::geometry::quadrature::{quadrature_polygon, quadrature_segment};
use crate::geometry::BoundarySegment;
use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{barycentric, dot, midpoint, normalize, p1_gradients, sub, Point};

/// Quadrature orders: area terms are at most quadratic in P1, boundary and
/// facet terms get one order more for the data terms.
pub const VOLUME_QUAD_ORDER: usize = 2;
pub const BOUNDARY_QUAD_ORDER: usize = 3;

/// Source field evaluated inside a known element; the element index lets
/// nodally interpolated data use the local barycentric representation.
pub type SourceField<'a> = &'a dyn Fn(usize, Point) -> f64;

/// Dirichlet datum on the approximate boundary: either the conforming
/// piecewise-linear interpolation (values at the segment endpoints) or the
/// piecewise-constant interpolation (value at the segment midpoint).
pub enum BoundaryField<'a> {
    Linear(&'a dyn Fn(Point) -> f64),
    Constant(&'a dyn Fn(Point) -> f64),
}

impl BoundaryField<'_> {
    /// Evaluate `g_h` at parameter `t` along the segment.
    pub fn eval(&self, seg: &BoundarySegment, t: f64) -> f64 {
        match self {
            BoundaryField::Linear(g) => {
                let ga = g(seg.a);
                let gb = g(seg.b);
                ga + t * (gb - ga)
            }
            BoundaryField::Constant(g) => g(midpoint(seg.a, seg.b)),
        }
    }
}

/// Assembled Nitsche + ghost-penalty system.
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    /// Cut elements skipped from boundary terms because their boundary
    /// segment degenerated to zero measure after snapping.
    pub skipped_boundary_segments: usize,
}

/// Assemble `A_ij = a_h(phi_j, phi_i)` and `b_i = l_h(phi_i)`.
pub fn assemble(
    mesh: &TriMesh,
    cut: &CutTopology,
    space: &FeSpace,
    f: SourceField,
    g_h: &BoundaryField,
    beta: f64,
    gamma: f64,
) -> LinearSystem {
    assert!(beta > 0.0, "Nitsche penalty must be positive");
    assert!(gamma >= 0.0, "ghost penalty must be non-negative");
    assert_eq!(cut.mesh_id(), mesh.id());

    let n = space.ndof();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rhs = vec![0.0; n];
    let mut skipped = 0usize;

    // Volume terms over the clipped polygons, in ascending element order.
    for (k, &t) in cut.active.iter().enumerate() {
        let clip = &cut.clips[k];
        let pts = mesh.triangle_points(t);
        let grads = p1_gradients(pts);
        let dofs = space.element_dofs(mesh, t);
        let rule = quadrature_polygon(&clip.inside_polygon, VOLUME_QUAD_ORDER)
            .expect("volume quadrature");
        let area: f64 = rule.iter().map(|q| q.weight).sum();

        for i in 0..3 {
            for j in 0..3 {
                let v = dot(grads[i], grads[j]) * area;
                rows[dofs[i]].push((dofs[j], v));
            }
        }
        for q in &rule {
            let l = barycentric(pts, q.point);
            let fv = f(t, q.point);
            for i in 0..3 {
                rhs[dofs[i]] += q.weight * fv * l[i];
            }
        }
    }

    // Nitsche terms on the boundary segments of cut elements.
    for &t in &cut.cut {
        let clip = cut.clip_of(t).unwrap();
        let seg = match &clip.boundary_segment {
            Some(s) if s.length() > 0.0 => s,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let pts = mesh.triangle_points(t);
        let grads = p1_gradients(pts);
        let dofs = space.element_dofs(mesh, t);
        let h_k = mesh.diameter(t);
        let dn: [f64; 3] = std::array::from_fn(|i| dot(seg.normal, grads[i]));
        let rule = quadrature_segment(seg.a, seg.b, BOUNDARY_QUAD_ORDER)
            .expect("segment quadrature");
        let seg_len = seg.length();

        for q in &rule {
            let l = barycentric(pts, q.point);
            let t_par = crate::vec2::dist(q.point, seg.a) / seg_len;
            let gv = g_h.eval(seg, t_par);
            for i in 0..3 {
                for j in 0..3 {
                    // Grouped so the (i, j) and (j, i) values round
                    // identically and A stays symmetric to the bit.
                    let consistency = -(dn[i] * l[j] + l[i] * dn[j]);
                    let penalty = beta / h_k * (l[i] * l[j]);
                    rows[dofs[i]].push((dofs[j], q.weight * (consistency + penalty)));
                }
                rhs[dofs[i]] += q.weight * (-gv * dn[i] + beta / h_k * gv * l[i]);
            }
        }
    }

    // Ghost penalty over entire ghost facets.
    for &fidx in &cut.ghost_facets {
        let facet = &mesh.facets[fidx];
        let owner = facet.owner;
        let neighbor = facet.neighbor.expect("ghost facets are interior");
        let (pa, pb) = (mesh.vertices[facet.v[0]], mesh.vertices[facet.v[1]]);
        let h_f = crate::vec2::dist(pa, pb);
        // Orientation of n_f is irrelevant: the jump enters squared.
        let n_f = normalize([pb[1] - pa[1], -(pb[0] - pa[0])]);

        // Jump coefficients per incident dof: n . grad from the owner side
        // minus n . grad from the neighbor side.
        let mut jump: Vec<(usize, f64)> = Vec::with_capacity(4);
        let add_side = |t: usize, sign: f64, jump: &mut Vec<(usize, f64)>| {
            let grads = p1_gradients(mesh.triangle_points(t));
            let dofs = space.element_dofs(mesh, t);
            for i in 0..3 {
                let c = sign * dot(n_f, grads[i]);
                if let Some(slot) = jump.iter_mut().find(|(d, _)| *d == dofs[i]) {
                    slot.1 += c;
                } else {
                    jump.push((dofs[i], c));
                }
            }
        };
        add_side(owner, 1.0, &mut jump);
        add_side(neighbor, -1.0, &mut jump);

        let scale = gamma * h_f * h_f; // gamma * h_F * |F|
        for &(di, ci) in &jump {
            for &(dj, cj) in &jump {
                // ci * cj first so the (i, j) and (j, i) entries round
                // identically and the matrix stays symmetric to the bit.
                rows[di].push((dj, scale * (ci * cj)));
            }
        }
    }

    LinearSystem {
        matrix: CsrMatrix::from_rows(rows),
        rhs,
        beta,
        gamma,
        skipped_boundary_segments: skipped,
    }
}

/// Residual `||A u - b||_2` of a coefficient vector in the assembled system.
pub fn system_residual(system: &LinearSystem, coeffs: &[f64]) -> f64 {
    let mut ax = vec![0.0; system.matrix.n];
    system.matrix.matvec(coeffs, &mut ax);
    ax.iter()
        .zip(&system.rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Evaluate the trace of a linear-mode boundary field at an arbitrary point
/// of a segment (used by indicator terms).
pub fn boundary_field_at(g_h: &BoundaryField, seg: &BoundarySegment, p: Point) -> f64 {
    let len = seg.length();
    if len == 0.0 {
        return g_h.eval(seg, 0.5);
    }
    let t = dot(sub(p, seg.a), sub(seg.b, seg.a)) / (len * len);
    g_h.eval(seg, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{interpolate_levelset, LevelSet};
    use crate::mesh::{build_background_mesh, extract_active, TriMesh};

    fn uncut_setup(mesh: TriMesh) -> (TriMesh, CutTopology, FeSpace) {
        let phi = LevelSet::from_fn(|_| -1.0);
        let phih = interpolate_levelset(&phi, &mesh).unwrap();
        let cut = extract_active(&mesh, &phih).unwrap();
        let space = FeSpace::build(&mesh, &cut);
        (mesh, cut, space)
    }

    #[test]
    fn reference_element_stiffness_matrix() {
        // Single uncut right triangle: the stiffness matrix is
        // 1/2 [[2,-1,-1],[-1,1,0],[-1,0,1]] by hand integration.
        let mesh = TriMesh::from_raw(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
        );
        let (mesh, cut, space) = uncut_setup(mesh);
        let g_h = BoundaryField::Linear(&|_| 0.0);
        let sys = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 10.0, 0.1);
        let expected = [
            [1.0, -0.5, -0.5],
            [-0.5, 0.5, 0.0],
            [-0.5, 0.0, 0.5],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (sys.matrix.get(i, j) - expected[i][j]).abs() < 1e-14,
                    "A[{i}][{j}] = {}",
                    sys.matrix.get(i, j)
                );
            }
        }
        assert!(sys.rhs.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn uncut_mesh_has_no_boundary_or_ghost_terms() {
        let mesh = build_background_mesh([0.0, 0.0, 1.0, 1.0], 4);
        let (mesh, cut, space) = uncut_setup(mesh);
        let g_h = BoundaryField::Linear(&|_| 0.0);
        let a0 = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 10.0, 0.0);
        let a1 = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 737.0, 5.0);
        // Neither beta nor gamma can matter without cut elements.
        assert_eq!(a0.matrix.values, a1.matrix.values);
    }

    #[test]
    fn ghost_penalty_vanishes_on_global_linears() {
        let mesh = build_background_mesh([-3.0, -3.0, 3.0, 3.0], 8);
        let phi = LevelSet::circle([0.0, 0.0], 2.0);
        let phih = interpolate_levelset(&phi, &mesh).unwrap();
        let cut = extract_active(&mesh, &phih).unwrap();
        let space = FeSpace::build(&mesh, &cut);
        let g = |p: Point| 1.0 + 2.0 * p[0] + 3.0 * p[1];
        let g_h = BoundaryField::Linear(&g);
        let with = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 10.0, 0.1);
        let without = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 10.0, 0.0);
        // (A_gamma - A_0) v = J v with J the ghost matrix; zero on linears.
        let v = space.interpolate(&mesh, g);
        let mut jw = vec![0.0; space.ndof()];
        let mut j0 = vec![0.0; space.ndof()];
        with.matrix.matvec(&v, &mut jw);
        without.matrix.matvec(&v, &mut j0);
        let energy: f64 = jw
            .iter()
            .zip(&j0)
            .zip(&v)
            .map(|((a, b), vi)| (a - b) * vi)
            .sum();
        assert!(energy.abs() < 1e-12, "j_h(v, v) = {energy}");
    }

    #[test]
    fn assembled_matrix_symmetric_to_the_bit() {
        let mesh = build_background_mesh([-4.5, -4.5, 4.5, 4.5], 16);
        let phi = crate::bench::example1().level_set;
        let phih = interpolate_levelset(&phi, &mesh).unwrap();
        let cut = extract_active(&mesh, &phih).unwrap();
        let space = FeSpace::build(&mesh, &cut);
        let g_h = BoundaryField::Linear(&|_| 0.0);
        let f = |_: usize, p: Point| if p[0] > 0.0 { 10.0 } else { 0.0 };
        let sys = assemble(&mesh, &cut, &space, &f, &g_h, 10.0, 0.1);
        assert!(sys.matrix.is_symmetric());
    }

    #[test]
    fn consistency_on_linear_solutions() {
        // For linear u with f = 0 and g_h = trace of u, the interpolant of u
        // satisfies the discrete equations up to rounding.
        let mesh = build_background_mesh([-3.0, -3.0, 3.0, 3.0], 16);
        let phi = LevelSet::circle([0.0, 0.0], 2.0);
        let phih = interpolate_levelset(&phi, &mesh).unwrap();
        let cut = extract_active(&mesh, &phih).unwrap();
        let space = FeSpace::build(&mesh, &cut);
        let u = |p: Point| 1.0 + 2.0 * p[0] + 3.0 * p[1];
        let g_h = BoundaryField::Linear(&u);
        let sys = assemble(&mesh, &cut, &space, &|_, _| 0.0, &g_h, 10.0, 0.1);
        let coeffs = space.interpolate(&mesh, u);
        let b_norm: f64 = sys.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        let res = system_residual(&sys, &coeffs);
        assert!(res <= 1e-10 * b_norm, "residual {res}, |b| {b_norm}");
    }
}
