//! Classification and clipping of triangles against the piecewise-linear
//! zero set of the nodal level set.
//!
//! A triangle is `Inside` when all snapped nodal values are <= 0, `Outside`
//! when all are >= 0, and `Cut` on a strict sign change. The clipped polygon
//! is computed from the linear interpolant only, so the approximate boundary
//! is by construction the polygonal zero set of the nodal field.

use crate::error::GeometryError;
use crate::vec2::{lerp, normalize, p1_gradients, polygon_area, scale, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementClass {
    Inside,
    Outside,
    Cut,
}

/// Straight segment of the approximate boundary inside one element, with the
/// unit normal pointing from the negative to the positive side.
#[derive(Clone, Copy, Debug)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    pub normal: Point,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        crate::vec2::dist(self.a, self.b)
    }
}

/// Result of clipping one triangle against the nodal zero set.
#[derive(Clone, Debug)]
pub struct ClipResult {
    pub class: ElementClass,
    /// Ordered (counter-clockwise) vertices of `K` intersected with the
    /// approximate domain; the whole triangle when `Inside`, empty when
    /// `Outside`, 3 or 4 vertices when `Cut`.
    pub inside_polygon: Vec<Point>,
    /// Complement part of the triangle (the boundary-strip `D_K` side).
    pub outside_polygon: Vec<Point>,
    pub boundary_segment: Option<BoundarySegment>,
    /// Portion of each local facet `(i, i+1)` lying in the approximate
    /// domain (the `E_K` descriptor).
    pub facet_portions: [Option<(Point, Point)>; 3],
    /// Nodal values after snapping.
    pub snapped: [f64; 3],
}

impl ClipResult {
    pub fn inside_area(&self) -> f64 {
        polygon_area(&self.inside_polygon)
    }

    pub fn outside_area(&self) -> f64 {
        polygon_area(&self.outside_polygon)
    }

    /// True when the closed element touches the zero set, i.e. it is cut or
    /// carries a snapped-zero vertex. A linear function attains its extrema
    /// at the vertices, so `min <= 0 <= max` is exact.
    pub fn touches_boundary(&self) -> bool {
        self.class == ElementClass::Cut || self.snapped.iter().any(|&s| s == 0.0)
    }
}

fn orient_ccw(poly: &mut [Point]) {
    if polygon_area(poly) < 0.0 {
        poly.reverse();
    }
}

/// Classify a triangle by its nodal level-set values and clip it against the
/// zero line of their linear interpolant. Values with magnitude below
/// `snap_tol` are treated as exactly zero before classification.
pub fn classify_and_clip(
    pts: [Point; 3],
    values: [f64; 3],
    snap_tol: f64,
) -> Result<ClipResult, GeometryError> {
    let mut s = [0.0; 3];
    for i in 0..3 {
        s[i] = if values[i].abs() < snap_tol {
            0.0
        } else {
            values[i]
        };
    }

    let n_pos = s.iter().filter(|&&v| v > 0.0).count();
    let n_neg = s.iter().filter(|&&v| v < 0.0).count();

    if n_pos == 0 && n_neg == 0 {
        return Err(GeometryError::DegenerateCut);
    }

    let whole_facets = |inside: bool| {
        let mut portions = [None, None, None];
        if inside {
            for (i, slot) in portions.iter_mut().enumerate() {
                *slot = Some((pts[i], pts[(i + 1) % 3]));
            }
        }
        portions
    };

    if n_pos == 0 {
        let mut poly = pts.to_vec();
        orient_ccw(&mut poly);
        return Ok(ClipResult {
            class: ElementClass::Inside,
            inside_polygon: poly,
            outside_polygon: Vec::new(),
            boundary_segment: None,
            facet_portions: whole_facets(true),
            snapped: s,
        });
    }
    if n_neg == 0 {
        let mut poly = pts.to_vec();
        orient_ccw(&mut poly);
        return Ok(ClipResult {
            class: ElementClass::Outside,
            inside_polygon: Vec::new(),
            outside_polygon: poly,
            boundary_segment: None,
            facet_portions: whole_facets(false),
            snapped: s,
        });
    }

    // Strict sign change: walk the triangle boundary collecting vertices on
    // each side and the interpolation roots where edges cross the zero line.
    let mut inside = Vec::with_capacity(4);
    let mut outside = Vec::with_capacity(4);
    let mut zero_points: Vec<Point> = Vec::with_capacity(2);
    let mut facet_portions = [None, None, None];

    for i in 0..3 {
        let j = (i + 1) % 3;
        let (vi, vj) = (s[i], s[j]);
        if vi <= 0.0 {
            inside.push(pts[i]);
        }
        if vi >= 0.0 {
            outside.push(pts[i]);
        }
        if vi == 0.0 {
            zero_points.push(pts[i]);
        }

        let mut portion = None;
        if vi * vj < 0.0 {
            let t = vi / (vi - vj);
            let root = lerp(pts[i], pts[j], t);
            inside.push(root);
            outside.push(root);
            zero_points.push(root);
            portion = if vi < 0.0 {
                Some((pts[i], root))
            } else {
                Some((root, pts[j]))
            };
        } else if vi <= 0.0 && vj <= 0.0 {
            portion = Some((pts[i], pts[j]));
        }
        facet_portions[i] = portion;
    }

    debug_assert_eq!(zero_points.len(), 2, "cut element must have two roots");

    // Unit normal of the zero line from the interpolant gradient.
    let grads = p1_gradients(pts);
    let mut grad = [0.0, 0.0];
    for i in 0..3 {
        let g = scale(s[i], grads[i]);
        grad = crate::vec2::add(grad, g);
    }
    let normal = normalize(grad);

    orient_ccw(&mut inside);
    orient_ccw(&mut outside);

    Ok(ClipResult {
        class: ElementClass::Cut,
        inside_polygon: inside,
        outside_polygon: outside,
        boundary_segment: Some(BoundarySegment {
            a: zero_points[0],
            b: zero_points[1],
            normal,
        }),
        facet_portions,
        snapped: s,
    })
}
