//! Signed level-set representation of the physical domain.
//!
//! The domain is `{x : phi(x) < 0}`; the sign convention is negative inside,
//! positive outside. Level sets are built from circle / half-plane / wedge
//! primitives combined with pointwise min (union of insides) and max
//! (intersection of insides), plus negation for carving holes.

use std::sync::Arc;

use crate::vec2::{dot, sub, Point};

/// Exact solution attachment: maps a point to `(u, grad u)`.
pub type ExactSolution = Arc<dyn Fn(Point) -> (f64, Point) + Send + Sync>;
/// Source term attachment: maps a point to `f`.
pub type SourceTerm = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum LevelSetExpr {
    /// `(x - cx)^2 + (y - cy)^2 - r^2`.
    Circle { center: Point, radius: f64 },
    /// `n . (x - p)`; the normal points out of the inside half-plane.
    HalfPlane { point: Point, normal: Point },
    /// Sector `{0 < polar angle about apex < angle}`, `angle` in `(0, 2*pi)`.
    Wedge { apex: Point, angle: f64 },
    Min(Vec<LevelSetExpr>),
    Max(Vec<LevelSetExpr>),
    Neg(Box<LevelSetExpr>),
    /// Arbitrary scalar field, used by tests and for translated geometries.
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl LevelSetExpr {
    pub fn evaluate(&self, p: Point) -> f64 {
        match self {
            LevelSetExpr::Circle { center, radius } => {
                let d = sub(p, *center);
                dot(d, d) - radius * radius
            }
            LevelSetExpr::HalfPlane { point, normal } => dot(*normal, sub(p, *point)),
            LevelSetExpr::Wedge { apex, angle } => {
                let (sa, sb) = wedge_sides(*apex, *angle, p);
                if *angle <= std::f64::consts::PI {
                    sa.max(sb)
                } else {
                    sa.min(sb)
                }
            }
            LevelSetExpr::Min(parts) => parts
                .iter()
                .map(|e| e.evaluate(p))
                .fold(f64::INFINITY, f64::min),
            LevelSetExpr::Max(parts) => parts
                .iter()
                .map(|e| e.evaluate(p))
                .fold(f64::NEG_INFINITY, f64::max),
            LevelSetExpr::Neg(inner) => -inner.evaluate(p),
            LevelSetExpr::Custom(f) => f(p),
        }
    }

    /// Gradient of the active branch; min/max pick the branch attaining the
    /// value (first one on ties), custom fields use central differences.
    pub fn gradient(&self, p: Point) -> Point {
        match self {
            LevelSetExpr::Circle { center, .. } => {
                let d = sub(p, *center);
                [2.0 * d[0], 2.0 * d[1]]
            }
            LevelSetExpr::HalfPlane { normal, .. } => *normal,
            LevelSetExpr::Wedge { apex, angle } => {
                let (sa, sb) = wedge_sides(*apex, *angle, p);
                let ga = [0.0, -1.0];
                let gb = [-angle.sin(), angle.cos()];
                let a_wins = if *angle <= std::f64::consts::PI {
                    sa >= sb
                } else {
                    sa <= sb
                };
                if a_wins {
                    ga
                } else {
                    gb
                }
            }
            LevelSetExpr::Min(parts) => {
                let mut best = f64::INFINITY;
                let mut grad = [0.0, 0.0];
                for e in parts {
                    let v = e.evaluate(p);
                    if v < best {
                        best = v;
                        grad = e.gradient(p);
                    }
                }
                grad
            }
            LevelSetExpr::Max(parts) => {
                let mut best = f64::NEG_INFINITY;
                let mut grad = [0.0, 0.0];
                for e in parts {
                    let v = e.evaluate(p);
                    if v > best {
                        best = v;
                        grad = e.gradient(p);
                    }
                }
                grad
            }
            LevelSetExpr::Neg(inner) => {
                let g = inner.gradient(p);
                [-g[0], -g[1]]
            }
            LevelSetExpr::Custom(f) => {
                let h = 1e-6 * p[0].abs().max(p[1].abs()).max(1.0);
                [
                    (f([p[0] + h, p[1]]) - f([p[0] - h, p[1]])) / (2.0 * h),
                    (f([p[0], p[1] + h]) - f([p[0], p[1] - h])) / (2.0 * h),
                ]
            }
        }
    }
}

/// Half-plane side values of a wedge: `sa < 0` above the edge at angle 0,
/// `sb < 0` clockwise of the edge at `angle`.
fn wedge_sides(apex: Point, angle: f64, p: Point) -> (f64, f64) {
    let d = sub(p, apex);
    let sa = -d[1];
    let sb = angle.cos() * d[1] - angle.sin() * d[0];
    (sa, sb)
}

/// Level-set description of the domain with optional problem data attached.
#[derive(Clone)]
pub struct LevelSet {
    pub expr: LevelSetExpr,
    pub exact_solution: Option<ExactSolution>,
    pub source: Option<SourceTerm>,
}

impl LevelSet {
    pub fn new(expr: LevelSetExpr) -> Self {
        LevelSet {
            expr,
            exact_solution: None,
            source: None,
        }
    }

    pub fn circle(center: Point, radius: f64) -> Self {
        Self::new(LevelSetExpr::Circle { center, radius })
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(Point) -> f64 + Send + Sync + 'static,
    {
        Self::new(LevelSetExpr::Custom(Arc::new(f)))
    }

    pub fn with_exact_solution(mut self, exact: ExactSolution) -> Self {
        self.exact_solution = Some(exact);
        self
    }

    pub fn with_source(mut self, source: SourceTerm) -> Self {
        self.source = Some(source);
        self
    }

    pub fn evaluate(&self, p: Point) -> f64 {
        self.expr.evaluate(p)
    }

    pub fn gradient(&self, p: Point) -> Point {
        self.expr.gradient(p)
    }
}
