//! Small helpers for points and vectors in the plane.

pub type Point = [f64; 2];

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(s: f64, a: Point) -> Point {
    [s * a[0], s * a[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the cross product `a x b`.
#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn normalize(a: Point) -> Point {
    let n = norm(a);
    [a[0] / n, a[1] / n]
}

/// `a + t (b - a)`.
#[inline]
pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

#[inline]
pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Twice the signed area of the triangle `(a, b, c)`.
#[inline]
pub fn signed_area_x2(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Shoelace area of a simple polygon; positive when counter-clockwise.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        twice += cross(a, b);
    }
    0.5 * twice
}

/// Gradients of the three P1 barycentric basis functions on a triangle.
pub fn p1_gradients(p: [Point; 3]) -> [Point; 3] {
    let twice_area = signed_area_x2(p[0], p[1], p[2]);
    let rot = |v: Point| [v[1], -v[0]];
    [
        scale(1.0 / twice_area, rot(sub(p[1], p[2]))),
        scale(1.0 / twice_area, rot(sub(p[2], p[0]))),
        scale(1.0 / twice_area, rot(sub(p[0], p[1]))),
    ]
}

/// Barycentric coordinates of `x` with respect to the triangle `p`.
pub fn barycentric(p: [Point; 3], x: Point) -> [f64; 3] {
    let twice_area = signed_area_x2(p[0], p[1], p[2]);
    [
        signed_area_x2(x, p[1], p[2]) / twice_area,
        signed_area_x2(p[0], x, p[2]) / twice_area,
        signed_area_x2(p[0], p[1], x) / twice_area,
    ]
}
