//! Data oscillation diagnostic: distance of the source from its best local
//! constant on vertex patches, weighted by the element size. Reported
//! alongside the estimator; never used for marking.

use crate::assembly::forms::SourceField;
use crate::estimator::bc_mesh::BcMesh;
use crate::geometry::clip::classify_and_clip;
use crate::geometry::quadrature::quadrature_polygon;
use crate::geometry::{ElementClass, NodalField};
use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{barycentric, dist};

#[derive(Clone, Debug)]
pub struct Oscillation {
    pub total: f64,
    /// Cut elements whose chosen vertex patch has a suspiciously small
    /// clipped diameter relative to the element size.
    pub thin_patches: Vec<usize>,
    /// True when the part of the oscillation outside the approximate domain
    /// was skipped because no boundary-correction mesh was supplied.
    pub outer_part_omitted: bool,
}

/// Evaluate the oscillation of `f`. The part of each cut element between
/// the approximate and the true boundary is integrated over the
/// boundary-correction sub-triangles when `bc` is given, otherwise omitted
/// with a flag.
pub fn oscillation(
    mesh: &TriMesh,
    cut: &CutTopology,
    phih: &NodalField,
    f: SourceField,
    bc: Option<&BcMesh>,
) -> Oscillation {
    // Active elements sharing each vertex, in ascending element order.
    let mut patch_of_vertex: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertices.len()];
    for &t in &cut.active {
        for &v in &mesh.triangles[t].v {
            patch_of_vertex[v].push(t);
        }
    }

    let clipped_area = |t: usize| cut.clip_of(t).unwrap().inside_area();

    let mut total = 0.0;
    let mut thin_patches = Vec::new();
    let mut outer_part_omitted = false;

    for &t in &cut.active {
        let h_k = mesh.diameter(t);
        // Choose the vertex whose clipped patch has the largest area;
        // deterministic tie-break by vertex index.
        let z = *mesh.triangles[t]
            .v
            .iter()
            .max_by(|&&a, &&b| {
                let area_a: f64 = patch_of_vertex[a].iter().map(|&e| clipped_area(e)).sum();
                let area_b: f64 = patch_of_vertex[b].iter().map(|&e| clipped_area(e)).sum();
                area_a.total_cmp(&area_b).then(b.cmp(&a))
            })
            .unwrap();
        let patch = &patch_of_vertex[z];

        // Patch diameter check for cut elements.
        if cut.is_cut(t) {
            let mut pts = Vec::new();
            for &e in patch {
                pts.extend_from_slice(&cut.clip_of(e).unwrap().inside_polygon);
            }
            let mut diam = 0.0f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    diam = diam.max(dist(pts[i], pts[j]));
                }
            }
            if diam < 0.1 * h_k {
                thin_patches.push(t);
            }
        }

        // Best constant: the mean of f over the clipped patch.
        let mut mass = 0.0;
        let mut area = 0.0;
        for &e in patch {
            let rule =
                quadrature_polygon(&cut.clip_of(e).unwrap().inside_polygon, 3).unwrap();
            for q in &rule {
                mass += q.weight * f(e, q.point);
                area += q.weight;
            }
        }
        if area == 0.0 {
            continue;
        }
        let f_z = mass / area;

        let mut patch_term = 0.0;
        for &e in patch {
            let rule =
                quadrature_polygon(&cut.clip_of(e).unwrap().inside_polygon, 3).unwrap();
            for q in &rule {
                let d = f(e, q.point) - f_z;
                patch_term += q.weight * d * d;
            }
        }

        // Outer part: boundary-correction sub-triangles clipped to the
        // positive side of the nodal level set.
        let mut outer_term = 0.0;
        if cut.is_cut(t) {
            match bc {
                Some(bc) => {
                    let tri = &mesh.triangles[t];
                    let parent_pts = mesh.triangle_points(t);
                    let nodal = [
                        phih.values[tri.v[0]],
                        phih.values[tri.v[1]],
                        phih.values[tri.v[2]],
                    ];
                    for s in bc.triangles_of(t) {
                        let sub = bc.triangle_points(s);
                        let vals: [f64; 3] = std::array::from_fn(|i| {
                            let l = barycentric(parent_pts, sub[i]);
                            l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2]
                        });
                        if let Ok(clip) = classify_and_clip(sub, vals, 1e-14 * h_k) {
                            if clip.class == ElementClass::Inside {
                                continue;
                            }
                            let rule =
                                quadrature_polygon(&clip.outside_polygon, 3).unwrap();
                            for q in &rule {
                                let d = f(t, q.point) - f_z;
                                outer_term += q.weight * d * d;
                            }
                        }
                    }
                }
                None => outer_part_omitted = true,
            }
        }

        total += (h_k * h_k * (patch_term + outer_term)).sqrt();
    }

    Oscillation {
        total,
        thin_patches,
        outer_part_omitted,
    }
}
