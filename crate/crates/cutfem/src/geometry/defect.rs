//! Boundary-defect diagnostic: how far the polygonal approximate boundary
//! strays from the true zero set, measured per cut element relative to the
//! element diameter. For nodal interpolation of a smooth level set the
//! ratio is O(h_K), so it doubles as a geometric-assumption check.

use crate::geometry::level_set::LevelSet;
use crate::mesh::cut_topology::CutTopology;
use crate::mesh::tri_mesh::TriMesh;
use crate::vec2::{add, lerp, normalize, scale};

#[derive(Clone, Debug)]
pub struct BoundaryDefect {
    /// `(triangle index, max defect / h_K)` per cut element.
    pub per_element: Vec<(usize, f64)>,
    /// Cut elements where the root along the gradient direction could not
    /// be bracketed within `2 h_K`; assumption-violation report, not fatal.
    pub flagged: Vec<usize>,
}

impl BoundaryDefect {
    pub fn max_ratio(&self) -> f64 {
        self.per_element
            .iter()
            .map(|&(_, r)| r)
            .fold(0.0, f64::max)
    }
}

/// Estimate, for each cut element, the maximum distance from sample points
/// on its boundary segment to the true boundary along the level-set
/// gradient direction. Roots are found by bisection to tolerance 1e-12.
pub fn boundary_defect(
    phi: &LevelSet,
    mesh: &TriMesh,
    cut: &CutTopology,
    samples_per_segment: usize,
) -> BoundaryDefect {
    assert!(samples_per_segment >= 1);
    let mut per_element = Vec::with_capacity(cut.cut.len());
    let mut flagged = Vec::new();

    for &t in &cut.cut {
        let clip = cut.clip_of(t).unwrap();
        let seg = match &clip.boundary_segment {
            Some(s) => s,
            None => continue,
        };
        let h_k = mesh.diameter(t);
        let mut worst = 0.0f64;
        let mut bracket_failed = false;

        for i in 0..samples_per_segment {
            let tpar = (i as f64 + 0.5) / samples_per_segment as f64;
            let x = lerp(seg.a, seg.b, tpar);
            let phix = phi.evaluate(x);
            if phix == 0.0 {
                continue;
            }
            let dir = normalize(phi.gradient(x));
            // March downhill in phi to bracket the zero.
            let sign = phix.signum();
            let step_dir = scale(-sign, dir);
            let eval = |s: f64| phi.evaluate(add(x, scale(s, step_dir)));

            let max_s = 2.0 * h_k;
            let mut lo = 0.0;
            let mut hi = f64::NAN;
            let steps = 16;
            for k in 1..=steps {
                let s = max_s * k as f64 / steps as f64;
                if eval(s) * phix <= 0.0 {
                    hi = s;
                    lo = max_s * (k - 1) as f64 / steps as f64;
                    break;
                }
            }
            if hi.is_nan() {
                bracket_failed = true;
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-12 {
                    break;
                }
                if eval(mid) * phix <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            worst = worst.max(0.5 * (lo + hi));
        }

        per_element.push((t, worst / h_k));
        if bracket_failed {
            flagged.push(t);
        }
    }

    BoundaryDefect {
        per_element,
        flagged,
    }
}

/// Elements whose piecewise-linear level set misrepresents the exact one:
/// sampling the exact level set along each edge finds a different number of
/// sign alternations than the nodal interpolant sees. Such elements carry
/// boundary pieces the discrete geometry cannot express (for instance a
/// thin wedge passing between two vertices), violating the resolution
/// assumption behind the error analysis, and have to be refined before the
/// residual estimator is meaningful there.
pub fn unresolved_elements(
    phi: &LevelSet,
    mesh: &TriMesh,
    phih: &crate::geometry::NodalField,
    samples_per_edge: usize,
) -> Vec<usize> {
    assert!(samples_per_edge >= 2);
    let mut marked = Vec::new();

    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t].v;
        let pts = mesh.triangle_points(t);
        let snap = crate::mesh::cut_topology::SNAP_TOL_REL * mesh.diameter(t);
        let snap_val = |x: f64| if x.abs() < snap { 0.0 } else { x };

        let mut bad = false;
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            let (va, vb) = (snap_val(phih.values[a]), snap_val(phih.values[b]));
            let nodal_changes = usize::from(va * vb < 0.0);

            let mut changes = 0usize;
            let mut last_sign = 0.0f64;
            for i in 0..=samples_per_edge {
                let s = i as f64 / samples_per_edge as f64;
                let x = snap_val(phi.evaluate(lerp(pts[e], pts[(e + 1) % 3], s)));
                if x == 0.0 {
                    continue;
                }
                let sign = x.signum();
                if last_sign != 0.0 && sign != last_sign {
                    changes += 1;
                }
                last_sign = sign;
            }
            if changes != nodal_changes {
                bad = true;
                break;
            }
        }
        if bad {
            marked.push(t);
        }
    }
    marked
}
