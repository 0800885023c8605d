//! Boundary-correction mesh: a sub-triangulation of the cut elements whose
//! extra vertices sample the true (curved) boundary, carrying the
//! piecewise-linear correction field.
//!
//! Cut elements are partitioned by sorting their vertices by level-set
//! value and branching on the sign of the middle vertex and of one edge
//! midpoint, yielding five cell types with 2 / 4 / 4 / 2 / 1 sub-triangles.
//! Roots of the level set are found by bisection along element edges and
//! median segments; edge roots are shared between neighboring cut elements
//! so the correction field is conforming across them.
//!
//! The correction field equals `g - u_h` at vertices on the true boundary
//! and zero at interior vertices, hence it vanishes identically outside the
//! cut elements.

use std::collections::HashMap;

use crate::assembly::space::FeSpace;
use crate::geometry::level_set::LevelSet;
use crate::geometry::ElementClass;
use crate::mesh::cut_topology::SNAP_TOL_REL;
use crate::mesh::{CutTopology, TriMesh};
use crate::vec2::{dot, lerp, midpoint, p1_gradients, signed_area_x2, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellType {
    A,
    B,
    C,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexTag {
    OnTrueBoundary,
    Interior,
}

#[derive(Clone, Copy, Debug)]
pub struct BcTriangle {
    pub vertices: [usize; 3],
    pub parent: usize,
    pub cell_type: CellType,
}

#[derive(Clone, Debug)]
pub struct BcMesh {
    pub points: Vec<Point>,
    pub tags: Vec<VertexTag>,
    /// Nodal values of the correction field.
    pub e_tilde: Vec<f64>,
    pub triangles: Vec<BcTriangle>,
    /// Triangle range per parent cut element.
    ranges: HashMap<usize, std::ops::Range<usize>>,
    /// Cut elements handled by the chord fallback after a root-finding
    /// bracket failure.
    pub fallback_elements: Vec<usize>,
    /// Cut elements whose sorted values violated the sign precondition.
    pub downgraded_elements: usize,
    /// Sub-triangles dropped for having no area.
    pub dropped_degenerate: usize,
}

impl BcMesh {
    pub fn triangles_of(&self, parent: usize) -> std::ops::Range<usize> {
        self.ranges.get(&parent).cloned().unwrap_or(0..0)
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let v = self.triangles[t].vertices;
        [self.points[v[0]], self.points[v[1]], self.points[v[2]]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        0.5 * signed_area_x2(p[0], p[1], p[2])
    }

    /// Constant gradient of the correction field on one sub-triangle.
    pub fn grad_e_tilde(&self, t: usize) -> Point {
        let v = self.triangles[t].vertices;
        let grads = p1_gradients(self.triangle_points(t));
        let mut g = [0.0, 0.0];
        for k in 0..3 {
            g[0] += self.e_tilde[v[k]] * grads[k][0];
            g[1] += self.e_tilde[v[k]] * grads[k][1];
        }
        g
    }

    /// Squared gradient seminorm of the correction over one parent element.
    pub fn eta_bc_sq(&self, parent: usize) -> f64 {
        self.triangles_of(parent)
            .map(|t| {
                let g = self.grad_e_tilde(t);
                dot(g, g) * self.triangle_area(t)
            })
            .sum()
    }
}

/// Keys for vertices shared between neighboring cut elements.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum SharedKey {
    /// Root on a whole mesh edge (sorted vertex pair).
    EdgeRoot(usize, usize),
    /// Root on the half of an edge from the smaller vertex to the midpoint
    /// (`half = 0`) or from the midpoint to the larger vertex (`half = 1`).
    HalfEdgeRoot(usize, usize, u8),
    /// Midpoint of a mesh edge.
    EdgeMidpoint(usize, usize),
    /// A mesh vertex itself.
    MeshVertex(usize),
}

struct Builder<'a> {
    mesh: &'a TriMesh,
    space: &'a FeSpace,
    coeffs: &'a [f64],
    g: &'a dyn Fn(Point) -> f64,
    points: Vec<Point>,
    tags: Vec<VertexTag>,
    e_tilde: Vec<f64>,
    triangles: Vec<BcTriangle>,
    shared: HashMap<SharedKey, usize>,
    dropped: usize,
}

impl<'a> Builder<'a> {
    fn add_point(
        &mut self,
        key: Option<SharedKey>,
        p: Point,
        tag: VertexTag,
        parent: usize,
    ) -> usize {
        if let Some(k) = key {
            if let Some(&idx) = self.shared.get(&k) {
                return idx;
            }
        }
        let idx = self.points.len();
        self.points.push(p);
        self.tags.push(tag);
        let val = match tag {
            VertexTag::Interior => 0.0,
            VertexTag::OnTrueBoundary => {
                (self.g)(p) - self.space.eval_in_triangle(self.mesh, self.coeffs, parent, p)
            }
        };
        self.e_tilde.push(val);
        if let Some(k) = key {
            self.shared.insert(k, idx);
        }
        idx
    }

    fn push_triangle(&mut self, parent: usize, cell_type: CellType, v: [usize; 3], h_k: f64) {
        let p = [self.points[v[0]], self.points[v[1]], self.points[v[2]]];
        let twice = signed_area_x2(p[0], p[1], p[2]);
        let v = if twice < 0.0 { [v[0], v[2], v[1]] } else { v };
        if twice.abs() * 0.5 <= 1e-14 * h_k * h_k {
            self.dropped += 1;
            return;
        }
        self.triangles.push(BcTriangle {
            vertices: v,
            parent,
            cell_type,
        });
    }
}

/// Bisection for `phi = 0` on the segment `[a, b]`; endpoint values are
/// already snapped. Fails when the signs do not bracket a root.
fn root_on_segment(
    phi: &LevelSet,
    a: Point,
    b: Point,
    va: f64,
    vb: f64,
    snap: f64,
) -> Result<Point, ()> {
    if va == 0.0 {
        return Ok(a);
    }
    if vb == 0.0 {
        return Ok(b);
    }
    if va.signum() * vb.signum() > 0.0 {
        return Err(());
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut flo = va;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = {
            let v = phi.evaluate(lerp(a, b, mid));
            if v.abs() < snap {
                0.0
            } else {
                v
            }
        };
        if fm == 0.0 {
            return Ok(lerp(a, b, mid));
        }
        if flo.signum() * fm.signum() < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(lerp(a, b, 0.5 * (lo + hi)))
}

/// Build the boundary-correction mesh for the current solution.
pub fn build_bc_mesh(
    mesh: &TriMesh,
    cut: &CutTopology,
    space: &FeSpace,
    phi: &LevelSet,
    coeffs: &[f64],
    g: &dyn Fn(Point) -> f64,
) -> BcMesh {
    let mut b = Builder {
        mesh,
        space,
        coeffs,
        g,
        points: Vec::new(),
        tags: Vec::new(),
        e_tilde: Vec::new(),
        triangles: Vec::new(),
        shared: HashMap::new(),
        dropped: 0,
    };
    let mut ranges = HashMap::new();
    let mut fallback_elements = Vec::new();
    let mut downgraded = 0usize;

    for &t in &cut.cut {
        let start = b.triangles.len();
        let clip = cut.clip_of(t).unwrap();
        debug_assert_eq!(clip.class, ElementClass::Cut);
        let h_k = mesh.diameter(t);
        let snap = SNAP_TOL_REL * h_k;
        let tri = &mesh.triangles[t];
        let pts = mesh.triangle_points(t);

        // Sort local vertices by snapped nodal value.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| {
            clip.snapped[i]
                .total_cmp(&clip.snapped[j])
                .then(i.cmp(&j))
        });
        let z: [Point; 3] = [pts[order[0]], pts[order[1]], pts[order[2]]];
        let zv: [usize; 3] = [tri.v[order[0]], tri.v[order[1]], tri.v[order[2]]];
        let v: [f64; 3] = [
            clip.snapped[order[0]],
            clip.snapped[order[1]],
            clip.snapped[order[2]],
        ];

        if !(v[0] < 0.0 && v[2] > 0.0) {
            // Sign precondition violated; fall back to the chord.
            downgraded += 1;
            chord_fallback(&mut b, cut, t, h_k);
            fallback_elements.push(t);
            ranges.insert(t, start..b.triangles.len());
            continue;
        }

        let snap_val = |x: f64| if x.abs() < snap { 0.0 } else { x };
        let edge_key = |a: usize, c: usize| SharedKey::EdgeRoot(a.min(c), a.max(c));
        let half_key = |a: usize, c: usize| {
            // Half 0 runs from the smaller vertex index to the midpoint.
            let h = if a < c { 0u8 } else { 1u8 };
            SharedKey::HalfEdgeRoot(a.min(c), a.max(c), h)
        };
        let mid_key = |a: usize, c: usize| SharedKey::EdgeMidpoint(a.min(c), a.max(c));

        let result = (|| -> Result<(), ()> {
            if v[1] > 0.0 {
                let m12 = midpoint(z[1], z[2]);
                let vm = snap_val(phi.evaluate(m12));
                let r01 = root_on_segment(phi, z[0], z[1], v[0], v[1], snap)?;
                let r02 = root_on_segment(phi, z[0], z[2], v[0], v[2], snap)?;
                if vm >= 0.0 {
                    // Type a: one inside vertex, extra boundary sample on
                    // the median from z0 toward the far edge midpoint.
                    let rm = root_on_segment(phi, z[0], m12, v[0], vm, snap)?;
                    let i0 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[0])),
                        z[0],
                        VertexTag::Interior,
                        t,
                    );
                    let i1 = b.add_point(
                        Some(edge_key(zv[0], zv[1])),
                        r01,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i2 = b.add_point(None, rm, VertexTag::OnTrueBoundary, t);
                    let i3 = b.add_point(
                        Some(edge_key(zv[0], zv[2])),
                        r02,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    b.push_triangle(t, CellType::A, [i0, i1, i2], h_k);
                    b.push_triangle(t, CellType::A, [i0, i2, i3], h_k);
                } else {
                    // Type b: the boundary also bulges through the far edge.
                    let r1m = root_on_segment(phi, z[1], m12, v[1], vm, snap)?;
                    let r2m = root_on_segment(phi, m12, z[2], vm, v[2], snap)?;
                    let i0 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[0])),
                        z[0],
                        VertexTag::Interior,
                        t,
                    );
                    let i1 = b.add_point(
                        Some(edge_key(zv[0], zv[1])),
                        r01,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i2 = b.add_point(
                        Some(half_key(zv[1], zv[2])),
                        r1m,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i3 = b.add_point(
                        Some(mid_key(zv[1], zv[2])),
                        m12,
                        VertexTag::Interior,
                        t,
                    );
                    let i4 = b.add_point(
                        Some(half_key(zv[2], zv[1])),
                        r2m,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i5 = b.add_point(
                        Some(edge_key(zv[0], zv[2])),
                        r02,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    b.push_triangle(t, CellType::B, [i0, i1, i2], h_k);
                    b.push_triangle(t, CellType::B, [i0, i2, i3], h_k);
                    b.push_triangle(t, CellType::B, [i0, i3, i4], h_k);
                    b.push_triangle(t, CellType::B, [i0, i4, i5], h_k);
                }
            } else if v[1] < 0.0 {
                let m01 = midpoint(z[0], z[1]);
                let vm = snap_val(phi.evaluate(m01));
                let r02 = root_on_segment(phi, z[0], z[2], v[0], v[2], snap)?;
                let r12 = root_on_segment(phi, z[1], z[2], v[1], v[2], snap)?;
                if vm < 0.0 {
                    // Type c: two inside vertices, fan from the inside edge
                    // midpoint with an extra boundary sample on the median
                    // toward z2.
                    let rm = root_on_segment(phi, m01, z[2], vm, v[2], snap)?;
                    let im = b.add_point(
                        Some(mid_key(zv[0], zv[1])),
                        m01,
                        VertexTag::Interior,
                        t,
                    );
                    let i0 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[0])),
                        z[0],
                        VertexTag::Interior,
                        t,
                    );
                    let i1 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[1])),
                        z[1],
                        VertexTag::Interior,
                        t,
                    );
                    let i2 = b.add_point(
                        Some(edge_key(zv[1], zv[2])),
                        r12,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i3 = b.add_point(None, rm, VertexTag::OnTrueBoundary, t);
                    let i4 = b.add_point(
                        Some(edge_key(zv[0], zv[2])),
                        r02,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    b.push_triangle(t, CellType::C, [im, i1, i2], h_k);
                    b.push_triangle(t, CellType::C, [im, i2, i3], h_k);
                    b.push_triangle(t, CellType::C, [im, i3, i4], h_k);
                    b.push_triangle(t, CellType::C, [im, i4, i0], h_k);
                } else {
                    // Type d: the boundary intrudes through the inside edge,
                    // leaving two corner pieces.
                    let r0m = root_on_segment(phi, z[0], m01, v[0], vm, snap)?;
                    let r1m = root_on_segment(phi, m01, z[1], vm, v[1], snap)?;
                    let i0 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[0])),
                        z[0],
                        VertexTag::Interior,
                        t,
                    );
                    let i0m = b.add_point(
                        Some(half_key(zv[0], zv[1])),
                        r0m,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i02 = b.add_point(
                        Some(edge_key(zv[0], zv[2])),
                        r02,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i1 = b.add_point(
                        Some(SharedKey::MeshVertex(zv[1])),
                        z[1],
                        VertexTag::Interior,
                        t,
                    );
                    let i1m = b.add_point(
                        Some(half_key(zv[1], zv[0])),
                        r1m,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    let i12 = b.add_point(
                        Some(edge_key(zv[1], zv[2])),
                        r12,
                        VertexTag::OnTrueBoundary,
                        t,
                    );
                    b.push_triangle(t, CellType::D, [i0, i0m, i02], h_k);
                    b.push_triangle(t, CellType::D, [i1, i12, i1m], h_k);
                }
            } else {
                // Type e: the middle vertex sits exactly on the boundary.
                let r02 = root_on_segment(phi, z[0], z[2], v[0], v[2], snap)?;
                let i0 = b.add_point(
                    Some(SharedKey::MeshVertex(zv[0])),
                    z[0],
                    VertexTag::Interior,
                    t,
                );
                let i1 = b.add_point(
                    Some(SharedKey::MeshVertex(zv[1])),
                    z[1],
                    VertexTag::OnTrueBoundary,
                    t,
                );
                let i2 = b.add_point(
                    Some(edge_key(zv[0], zv[2])),
                    r02,
                    VertexTag::OnTrueBoundary,
                    t,
                );
                b.push_triangle(t, CellType::E, [i0, i1, i2], h_k);
            }
            Ok(())
        })();

        if result.is_err() {
            b.triangles.truncate(start);
            chord_fallback(&mut b, cut, t, h_k);
            fallback_elements.push(t);
        }
        ranges.insert(t, start..b.triangles.len());
    }

    BcMesh {
        points: b.points,
        tags: b.tags,
        e_tilde: b.e_tilde,
        triangles: b.triangles,
        ranges,
        fallback_elements,
        downgraded_elements: downgraded,
        dropped_degenerate: b.dropped,
    }
}

/// Fallback sub-triangulation from the clipped polygon, treating the chord
/// endpoints as boundary samples. Used only when proper root finding fails.
fn chord_fallback(b: &mut Builder, cut: &CutTopology, t: usize, h_k: f64) {
    let clip = cut.clip_of(t).unwrap();
    let seg = match &clip.boundary_segment {
        Some(s) => *s,
        None => return,
    };
    let poly = &clip.inside_polygon;
    let mut idx = Vec::with_capacity(poly.len());
    for &p in poly {
        let on_chord = crate::vec2::dist(p, seg.a) < 1e-13 * h_k
            || crate::vec2::dist(p, seg.b) < 1e-13 * h_k;
        let tag = if on_chord {
            VertexTag::OnTrueBoundary
        } else {
            VertexTag::Interior
        };
        idx.push(b.add_point(None, p, tag, t));
    }
    for i in 1..poly.len() - 1 {
        b.push_triangle(t, CellType::E, [idx[0], idx[i], idx[i + 1]], h_k);
    }
}
