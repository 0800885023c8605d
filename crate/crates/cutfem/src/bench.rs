//! The four benchmark problems plus a linear patch test, each packaged as a
//! level set with attached data and per-problem run defaults.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::amr::AmrConfig;
use crate::error::AmrError;
use crate::geometry::level_set::{LevelSet, LevelSetExpr};
use crate::vec2::Point;

/// How the source term enters the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceMode {
    /// Evaluate the attached source directly.
    Analytic,
    /// Extend the source by zero outside the physical domain.
    ZeroOutsideDomain,
    /// Use the piecewise-linear nodal interpolation of the source.
    NodalInterpolation,
}

/// Which formula the flower petal centers use for their y-coordinates. The
/// published formula repeats the cosine for both coordinates, which puts
/// all centers on the diagonal; `Sin` is the symmetric variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example1Yi {
    Cos,
    Sin,
}

#[derive(Clone)]
pub struct BenchmarkSpec {
    pub name: String,
    pub level_set: LevelSet,
    /// Dirichlet datum on the true boundary.
    pub g: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    pub source_mode: SourceMode,
    pub bbox: [f64; 4],
    pub n0: usize,
    pub config: AmrConfig,
}

impl BenchmarkSpec {
    pub fn has_exact_solution(&self) -> bool {
        self.level_set.exact_solution.is_some()
    }
}

/// Flower petal layout shared by Examples 1 and 2.
struct Flower {
    r: f64,
    petal_radius: f64,
    centers: [Point; 8],
}

fn flower(yi: Example1Yi) -> Flower {
    let r = 2.0;
    let s8 = (PI / 8.0).sin();
    let c8 = (PI / 8.0).cos();
    let center_radius = r * (c8 + s8);
    let petal_radius = 2.0_f64.sqrt() * r * (s8 + c8) * s8;
    let centers = std::array::from_fn(|k| {
        let i = (k + 1) as f64;
        let x = center_radius * (i * PI / 4.0).cos();
        let y = match yi {
            Example1Yi::Cos => center_radius * (i * PI / 4.0).cos(),
            Example1Yi::Sin => center_radius * (i * PI / 4.0).sin(),
        };
        [x, y]
    });
    Flower {
        r,
        petal_radius,
        centers,
    }
}

fn flower_exprs(f: &Flower) -> (LevelSetExpr, Vec<LevelSetExpr>) {
    let base = LevelSetExpr::Circle {
        center: [0.0, 0.0],
        radius: f.r,
    };
    let petals = f
        .centers
        .iter()
        .map(|&c| LevelSetExpr::Circle {
            center: c,
            radius: f.petal_radius,
        })
        .collect();
    (base, petals)
}

/// Flower-shaped domain (union of a disc and eight petal discs), zero
/// boundary data, piecewise-constant source supported in the first petal.
pub fn example1() -> BenchmarkSpec {
    example1_with(Example1Yi::Cos)
}

pub fn example1_with(yi: Example1Yi) -> BenchmarkSpec {
    let fl = flower(yi);
    let (base, petals) = flower_exprs(&fl);
    let mut parts = vec![base];
    parts.extend(petals);
    let expr = LevelSetExpr::Min(parts);

    let c1 = fl.centers[0];
    let f_radius_sq = fl.petal_radius * fl.petal_radius / 2.0;
    let source = move |p: Point| {
        let dx = p[0] - c1[0];
        let dy = p[1] - c1[1];
        if dx * dx + dy * dy <= f_radius_sq {
            10.0
        } else {
            0.0
        }
    };

    let level_set = LevelSet::new(expr).with_source(Arc::new(source));
    BenchmarkSpec {
        name: "example1".into(),
        level_set,
        g: Arc::new(|_| 0.0),
        source_mode: SourceMode::ZeroOutsideDomain,
        // The flower reaches radius r(cos pi/8 + sin pi/8) + r/sqrt(2),
        // about 4.03 for r = 2, so the box must be wider than that.
        bbox: [-4.5, -4.5, 4.5, 4.5],
        n0: 16,
        config: AmrConfig {
            max_dofs: 7000,
            ..AmrConfig::default()
        },
    }
}

/// Disc with eight petal-shaped bites, `f = 0` and `g = y^2`.
pub fn example2() -> BenchmarkSpec {
    example2_with(Example1Yi::Cos)
}

pub fn example2_with(yi: Example1Yi) -> BenchmarkSpec {
    let fl = flower(yi);
    let (base, petals) = flower_exprs(&fl);
    let mut parts = vec![base];
    parts.extend(
        petals
            .into_iter()
            .map(|p| LevelSetExpr::Neg(Box::new(p))),
    );
    let expr = LevelSetExpr::Max(parts);

    let level_set = LevelSet::new(expr).with_source(Arc::new(|_| 0.0));
    BenchmarkSpec {
        name: "example2".into(),
        level_set,
        g: Arc::new(|p: Point| p[1] * p[1]),
        source_mode: SourceMode::ZeroOutsideDomain,
        bbox: [-3.5, -3.5, 3.5, 3.5],
        n0: 16,
        config: AmrConfig {
            max_dofs: 7000,
            ..AmrConfig::default()
        },
    }
}

/// Offset of the sector examples' bounding box. A box centered on the
/// origin puts bisection midpoints (and, for even resolutions, whole grid
/// lines) exactly on the slit face along the positive x-axis; the nodal
/// level set then vanishes on mesh facets and those boundary pieces carry
/// no cut elements and hence no boundary terms. The shift keeps the
/// boundary transversal to the mesh at every refinement level.
const SECTOR_BBOX_SHIFT: f64 = 0.0137;

/// Polar angle measured around the origin on a branch that is continuous
/// across the reentrant sector: the cut sits in the middle of the excluded
/// wedge rather than on its edges.
fn sector_angle(p: Point, omega: f64) -> f64 {
    let mut theta = p[1].atan2(p[0]);
    if theta < omega / 2.0 - PI {
        theta += 2.0 * PI;
    }
    theta
}

fn corner_solution(p: Point, alpha: f64, omega: f64) -> (f64, Point) {
    let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
    if r < 1e-300 {
        return (0.0, [0.0, 0.0]);
    }
    let theta = sector_angle(p, omega);
    let u = r.powf(alpha) * (alpha * theta).sin();
    let common = alpha * r.powf(alpha - 1.0);
    let (sin_t, cos_t) = theta.sin_cos();
    let (sin_at, cos_at) = (alpha * theta).sin_cos();
    let grad = [
        common * (sin_at * cos_t - cos_at * sin_t),
        common * (sin_at * sin_t + cos_at * cos_t),
    ];
    (u, grad)
}

/// Unit-disc sector with a reentrant corner of interior angle `omega` at
/// the origin; the exact solution is the pure corner singularity.
pub fn example3(omega: f64) -> Result<BenchmarkSpec, AmrError> {
    if !(omega > PI && omega < 2.0 * PI) {
        return Err(AmrError::Config(format!(
            "omega = {omega} is not a reentrant corner angle: it must lie strictly \
             between pi and 2*pi"
        )));
    }
    let alpha = PI / omega;

    let expr = LevelSetExpr::Max(vec![
        LevelSetExpr::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        },
        LevelSetExpr::Min(vec![
            LevelSetExpr::HalfPlane {
                point: [0.0, 0.0],
                normal: [0.0, -1.0],
            },
            LevelSetExpr::HalfPlane {
                point: [0.0, 0.0],
                normal: [-omega.sin(), omega.cos()],
            },
        ]),
    ]);

    let exact = move |p: Point| corner_solution(p, alpha, omega);
    let level_set = LevelSet::new(expr)
        .with_exact_solution(Arc::new(exact))
        .with_source(Arc::new(|_| 0.0));

    Ok(BenchmarkSpec {
        name: "example3".into(),
        level_set,
        g: Arc::new(move |p: Point| corner_solution(p, alpha, omega).0),
        source_mode: SourceMode::Analytic,
        bbox: [
            -1.5 + SECTOR_BBOX_SHIFT,
            -1.5 + SECTOR_BBOX_SHIFT,
            1.5 + SECTOR_BBOX_SHIFT,
            1.5 + SECTOR_BBOX_SHIFT,
        ],
        n0: 16,
        config: AmrConfig {
            max_dofs: 5000,
            ..AmrConfig::default()
        },
    })
}

/// Reentrant sector solution plus a sharp interior peak at (0.5, 0.5);
/// data are taken as nodal interpolants.
pub fn example4() -> BenchmarkSpec {
    let omega = 31.0 * PI / 16.0;
    let alpha = PI / omega;
    let base = example3(omega).expect("31*pi/16 is a valid corner angle");

    let peak = |p: Point| -> (f64, Point, f64) {
        let dx = p[0] - 0.5;
        let dy = p[1] - 0.5;
        let s = dx * dx + dy * dy;
        let e = (-100.0 * s).exp();
        // value, gradient, -laplacian
        (
            e,
            [-200.0 * dx * e, -200.0 * dy * e],
            e * (400.0 - 40000.0 * s),
        )
    };

    let exact = move |p: Point| -> (f64, Point) {
        let (uc, gc) = corner_solution(p, alpha, omega);
        let (up, gp, _) = peak(p);
        (uc + up, [gc[0] + gp[0], gc[1] + gp[1]])
    };
    let source = move |p: Point| peak(p).2;
    let g = move |p: Point| exact(p).0;

    let level_set = LevelSet::new(base.level_set.expr.clone())
        .with_exact_solution(Arc::new(exact))
        .with_source(Arc::new(source));

    BenchmarkSpec {
        name: "example4".into(),
        level_set,
        g: Arc::new(g),
        source_mode: SourceMode::NodalInterpolation,
        bbox: base.bbox,
        n0: base.n0,
        config: AmrConfig {
            max_dofs: 7500,
            max_steps: 50,
            ..AmrConfig::default()
        },
    }
}

/// Circle domain with a manufactured linear solution; Nitsche consistency
/// makes the discrete solution reproduce it exactly.
pub fn linear_patch_on_circle() -> BenchmarkSpec {
    let u = |p: Point| 1.0 + 2.0 * p[0] + 3.0 * p[1];
    let exact = move |p: Point| (u(p), [2.0, 3.0]);
    let level_set = LevelSet::circle([0.0, 0.0], 2.0)
        .with_exact_solution(Arc::new(exact))
        .with_source(Arc::new(|_| 0.0));
    BenchmarkSpec {
        name: "patch".into(),
        level_set,
        g: Arc::new(u),
        source_mode: SourceMode::Analytic,
        bbox: [-3.0, -3.0, 3.0, 3.0],
        n0: 16,
        config: AmrConfig {
            max_dofs: 2000,
            max_steps: 1,
            ..AmrConfig::default()
        },
    }
}

/// Benchmark around a custom level set with homogeneous data.
pub fn custom_benchmark(expr: LevelSetExpr, bbox: [f64; 4], n0: usize) -> BenchmarkSpec {
    BenchmarkSpec {
        name: "custom".into(),
        level_set: LevelSet::new(expr).with_source(Arc::new(|_| 0.0)),
        g: Arc::new(|_| 0.0),
        source_mode: SourceMode::ZeroOutsideDomain,
        bbox,
        n0,
        config: AmrConfig::default(),
    }
}
