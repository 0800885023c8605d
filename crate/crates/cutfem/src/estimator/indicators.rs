//! Residual error indicator with four components per element: interior
//! residual, normal-derivative jumps, Nitsche boundary mismatch and the
//! boundary-correction gradient.

use crate::assembly::forms::{boundary_field_at, BoundaryField, SourceField};
use crate::assembly::space::FeSpace;
use crate::error::EstimatorError;
use crate::estimator::bc_mesh::BcMesh;
use crate::geometry::quadrature::{quadrature_polygon, quadrature_segment};
use crate::geometry::ElementClass;
use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{dist, dot, normalize, sub};

/// Per-element indicator components (squared) and their aggregates.
#[derive(Clone, Debug)]
pub struct IndicatorField {
    /// `h_K^2 ||f||^2` over the clipped element.
    pub residual_sq: Vec<f64>,
    /// `sum_F (h_F / 2) ||[d_n u_h]||^2_F` over the interior facets of `K`.
    pub jump_sq: Vec<f64>,
    /// `h_K^{-1} ||g_h - u_h||^2` over the boundary segment.
    pub nitsche_sq: Vec<f64>,
    /// `||grad e_tilde||^2` over the physical part of the element.
    pub bc_sq: Vec<f64>,
    /// `eta_K`, including the correction term only in correction mode.
    pub eta_k: Vec<f64>,
    /// Global estimator, the root of the sum of `eta_K^2`.
    pub eta: f64,
    pub include_bc: bool,
}

impl IndicatorField {
    pub fn component_norm(component: &[f64]) -> f64 {
        component.iter().sum::<f64>().sqrt()
    }

    pub fn eta_residual(&self) -> f64 {
        Self::component_norm(&self.residual_sq)
    }

    pub fn eta_jump(&self) -> f64 {
        Self::component_norm(&self.jump_sq)
    }

    pub fn eta_nitsche(&self) -> f64 {
        Self::component_norm(&self.nitsche_sq)
    }

    pub fn eta_bc(&self) -> f64 {
        Self::component_norm(&self.bc_sq)
    }
}

/// Assemble the indicator field for the current solution.
pub fn compute_indicators(
    mesh: &TriMesh,
    cut: &CutTopology,
    space: &FeSpace,
    coeffs: &[f64],
    f: SourceField,
    g_h: &BoundaryField,
    bc: &BcMesh,
    include_bc: bool,
) -> IndicatorField {
    let n = cut.active.len();
    let mut residual_sq = vec![0.0; n];
    let mut jump_sq = vec![0.0; n];
    let mut nitsche_sq = vec![0.0; n];
    let mut bc_sq = vec![0.0; n];

    for (k, &t) in cut.active.iter().enumerate() {
        let clip = &cut.clips[k];
        let h_k = mesh.diameter(t);

        // Interior residual over the clipped part (-Delta u_h = 0 for P1).
        let rule = quadrature_polygon(&clip.inside_polygon, 2).expect("volume rule");
        let mut f_sq = 0.0;
        for q in &rule {
            let fv = f(t, q.point);
            f_sq += q.weight * fv * fv;
        }
        residual_sq[k] = h_k * h_k * f_sq;

        // Normal-derivative jumps over whole interior facets, with the
        // facet-sharing factor 1/2 applied per element.
        let grad_here = space.gradient_in_triangle(mesh, coeffs, t);
        for &fidx in &mesh.triangle_facets[t] {
            if !cut.facet_is_interior(mesh, fidx) {
                continue;
            }
            let facet = &mesh.facets[fidx];
            let other = if facet.owner == t {
                facet.neighbor.unwrap()
            } else {
                facet.owner
            };
            let (pa, pb) = (mesh.vertices[facet.v[0]], mesh.vertices[facet.v[1]]);
            let h_f = dist(pa, pb);
            let n_f = normalize([pb[1] - pa[1], -(pb[0] - pa[0])]);
            let grad_other = space.gradient_in_triangle(mesh, coeffs, other);
            let jump = dot(n_f, sub(grad_here, grad_other));
            jump_sq[k] += 0.5 * h_f * jump * jump * h_f;
        }

        // Boundary data mismatch on the cut segment.
        if clip.class == ElementClass::Cut {
            if let Some(seg) = &clip.boundary_segment {
                if seg.length() > 0.0 {
                    let rule =
                        quadrature_segment(seg.a, seg.b, 3).expect("segment rule");
                    let mut mism = 0.0;
                    for q in &rule {
                        let gv = boundary_field_at(g_h, seg, q.point);
                        let uv = space.eval_in_triangle(mesh, coeffs, t, q.point);
                        mism += q.weight * (gv - uv) * (gv - uv);
                    }
                    nitsche_sq[k] = mism / h_k;
                }
            }
            bc_sq[k] = bc.eta_bc_sq(t);
        }
    }

    let eta_k: Vec<f64> = (0..n)
        .map(|k| {
            let mut s = residual_sq[k] + jump_sq[k] + nitsche_sq[k];
            if include_bc {
                s += bc_sq[k];
            }
            s.sqrt()
        })
        .collect();
    let eta = eta_k.iter().map(|e| e * e).sum::<f64>().sqrt();

    IndicatorField {
        residual_sq,
        jump_sq,
        nitsche_sq,
        bc_sq,
        eta_k,
        eta,
        include_bc,
    }
}

/// Ratio of the estimator to the true error; undefined when the true error
/// vanishes to working precision.
pub fn effectivity(
    indicators: &IndicatorField,
    true_error: f64,
) -> Result<f64, EstimatorError> {
    if !(true_error > 1e-14) {
        return Err(EstimatorError::UndefinedEffectivity);
    }
    Ok(indicators.eta / true_error)
}
