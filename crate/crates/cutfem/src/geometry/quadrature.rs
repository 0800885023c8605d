//! Quadrature rules for clipped polygons and boundary segments.
//!
//! Polygon rules fan-triangulate from the first vertex and place a symmetric
//! triangle rule on each sub-triangle; all weights are positive and sum to
//! the polygon area. Segment rules are Gauss-Legendre with `order` points,
//! exact to polynomial degree `2*order - 1`.

use crate::error::GeometryError;
use crate::vec2::{dist, signed_area_x2, Point};

/// Quadrature node with its weight; weights carry the measure of the domain.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub point: Point,
    pub weight: f64,
}

/// Symmetric triangle rules in barycentric coordinates, weights summing to 1.
/// Orders 3 and 4 share the positive 6-point degree-4 rule; the classical
/// 4-point degree-3 rule has a negative centroid weight and is avoided.
fn triangle_rule(order: usize) -> Result<Vec<([f64; 3], f64)>, GeometryError> {
    match order {
        1 => Ok(vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)]),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            Ok(vec![
                ([a, b, b], 1.0 / 3.0),
                ([b, a, b], 1.0 / 3.0),
                ([b, b, a], 1.0 / 3.0),
            ])
        }
        3 | 4 => {
            let (a1, b1, w1) = (
                0.108103018168070,
                0.445948490915965,
                0.223381589678011,
            );
            let (a2, b2, w2) = (
                0.816847572980459,
                0.091576213509771,
                0.109951743655322,
            );
            Ok(vec![
                ([a1, b1, b1], w1),
                ([b1, a1, b1], w1),
                ([b1, b1, a1], w1),
                ([a2, b2, b2], w2),
                ([b2, a2, b2], w2),
                ([b2, b2, a2], w2),
            ])
        }
        5 => {
            let (a1, b1, w1) = (
                0.059715871789770,
                0.470142064105115,
                0.132394152788506,
            );
            let (a2, b2, w2) = (
                0.797426985353087,
                0.101286507323456,
                0.125939180544827,
            );
            Ok(vec![
                ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
                ([a1, b1, b1], w1),
                ([b1, a1, b1], w1),
                ([b1, b1, a1], w1),
                ([a2, b2, b2], w2),
                ([b2, a2, b2], w2),
                ([b2, b2, a2], w2),
            ])
        }
        _ => Err(GeometryError::UnsupportedOrder(order)),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(order: usize) -> Result<Vec<(f64, f64)>, GeometryError> {
    match order {
        1 => Ok(vec![(0.0, 2.0)]),
        2 => {
            let x = 1.0 / 3.0_f64.sqrt();
            Ok(vec![(-x, 1.0), (x, 1.0)])
        }
        3 => {
            let x = (3.0 / 5.0_f64).sqrt();
            Ok(vec![(-x, 5.0 / 9.0), (0.0, 8.0 / 9.0), (x, 5.0 / 9.0)])
        }
        4 => Ok(vec![
            (-0.8611363115940526, 0.3478548451374538),
            (-0.3399810435848563, 0.6521451548625461),
            (0.3399810435848563, 0.6521451548625461),
            (0.8611363115940526, 0.3478548451374538),
        ]),
        5 => Ok(vec![
            (-0.9061798459386640, 0.2369268850561891),
            (-0.5384693101056831, 0.4786286704993665),
            (0.0, 0.5688888888888889),
            (0.5384693101056831, 0.4786286704993665),
            (0.9061798459386640, 0.2369268850561891),
        ]),
        _ => Err(GeometryError::UnsupportedOrder(order)),
    }
}

/// Quadrature over a convex polygon with 3 or 4 (or more) vertices.
/// Degenerate polygons (area below 1e-14) yield an empty rule.
pub fn quadrature_polygon(
    poly: &[Point],
    order: usize,
) -> Result<Vec<QuadPoint>, GeometryError> {
    let rule = triangle_rule(order)?;
    let mut out = Vec::new();
    if poly.len() < 3 {
        return Ok(out);
    }
    for i in 1..poly.len() - 1 {
        let (a, b, c) = (poly[0], poly[i], poly[i + 1]);
        let area = 0.5 * signed_area_x2(a, b, c);
        if area <= 1e-14 {
            continue;
        }
        for &(l, w) in &rule {
            out.push(QuadPoint {
                point: [
                    l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                    l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
                ],
                weight: w * area,
            });
        }
    }
    Ok(out)
}

/// Gauss-Legendre quadrature mapped to the segment `[a, b]`.
pub fn quadrature_segment(
    a: Point,
    b: Point,
    order: usize,
) -> Result<Vec<QuadPoint>, GeometryError> {
    let rule = gauss_legendre(order)?;
    let len = dist(a, b);
    if len == 0.0 {
        return Ok(Vec::new());
    }
    Ok(rule
        .into_iter()
        .map(|(x, w)| {
            let t = 0.5 * (1.0 + x);
            QuadPoint {
                point: [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
                weight: 0.5 * w * len,
            }
        })
        .collect())
}

/// Integrate a scalar field with a precomputed rule.
pub fn integrate<F: FnMut(Point) -> f64>(rule: &[QuadPoint], mut f: F) -> f64 {
    rule.iter().map(|q| q.weight * f(q.point)).sum()
}
