//! JSON run configuration: example selection, geometry and penalty
//! parameters, stopping criteria and output options. Unknown keys are
//! rejected so typos fail loudly.

use serde::Deserialize;

use crate::amr::{AmrConfig, GhMode};
use crate::bench::{self, BenchmarkSpec, Example1Yi};
use crate::error::RunError;
use crate::geometry::LevelSetExpr;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ExampleSel {
    Number(u8),
    Name(String),
}

/// Composition tree for custom level sets, mirroring the geometry
/// primitives. Externally tagged: `{"circle": {...}}`, `{"min": [...]}`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LevelSetSpec {
    Circle { center: [f64; 2], radius: f64 },
    HalfPlane { point: [f64; 2], normal: [f64; 2] },
    Wedge { apex: [f64; 2], angle: f64 },
    Min(Vec<LevelSetSpec>),
    Max(Vec<LevelSetSpec>),
    Neg(Box<LevelSetSpec>),
}

impl LevelSetSpec {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            LevelSetSpec::Circle { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(format!("circle radius {radius} must be positive"));
                }
            }
            LevelSetSpec::HalfPlane { normal, point } => {
                if !(normal[0].is_finite() && normal[1].is_finite())
                    || (normal[0] == 0.0 && normal[1] == 0.0)
                {
                    return Err("half-plane normal must be finite and nonzero".into());
                }
                if !(point[0].is_finite() && point[1].is_finite()) {
                    return Err("half-plane point must be finite".into());
                }
            }
            LevelSetSpec::Wedge { angle, apex } => {
                if !(angle.is_finite()
                    && *angle > 0.0
                    && *angle < 2.0 * std::f64::consts::PI)
                {
                    return Err(format!(
                        "wedge angle {angle} must lie strictly between 0 and 2*pi"
                    ));
                }
                if !(apex[0].is_finite() && apex[1].is_finite()) {
                    return Err("wedge apex must be finite".into());
                }
            }
            LevelSetSpec::Min(parts) | LevelSetSpec::Max(parts) => {
                if parts.is_empty() {
                    return Err("min/max composition needs at least one operand".into());
                }
                for p in parts {
                    p.validate()?;
                }
            }
            LevelSetSpec::Neg(inner) => inner.validate()?,
        }
        Ok(())
    }

    pub fn to_expr(&self) -> LevelSetExpr {
        match self {
            LevelSetSpec::Circle { center, radius } => LevelSetExpr::Circle {
                center: *center,
                radius: *radius,
            },
            LevelSetSpec::HalfPlane { point, normal } => LevelSetExpr::HalfPlane {
                point: *point,
                normal: *normal,
            },
            LevelSetSpec::Wedge { apex, angle } => LevelSetExpr::Wedge {
                apex: *apex,
                angle: *angle,
            },
            LevelSetSpec::Min(parts) => {
                LevelSetExpr::Min(parts.iter().map(|p| p.to_expr()).collect())
            }
            LevelSetSpec::Max(parts) => {
                LevelSetExpr::Max(parts.iter().map(|p| p.to_expr()).collect())
            }
            LevelSetSpec::Neg(inner) => LevelSetExpr::Neg(Box::new(inner.to_expr())),
        }
    }
}

/// Raw configuration file contents.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example: ExampleSel,
    pub n0: Option<usize>,
    /// `[xmin, ymin, xmax, ymax]`.
    pub bbox: Option<[f64; 4]>,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub max_dofs: Option<usize>,
    pub max_steps: Option<usize>,
    pub with_bc: Option<bool>,
    pub gh_mode: Option<String>,
    pub uniform: Option<bool>,
    pub omega: Option<f64>,
    pub vtk_every: Option<usize>,
    /// The solver carries no random state; accepted for compatibility but
    /// must not be false.
    #[serde(rename = "seed-free")]
    pub seed_free: Option<bool>,
    /// `"cos"` (as printed) or `"sin"` (symmetric petal layout).
    pub example1_yi: Option<String>,
    /// Required when `example` is `"custom"`, rejected otherwise.
    pub level_set: Option<LevelSetSpec>,
}

/// Validated configuration ready to run.
pub struct ResolvedConfig {
    pub benchmark: BenchmarkSpec,
    pub config: AmrConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedConfig, RunError> {
        let cfg_err = |msg: String| RunError::Config(msg);

        if self.seed_free == Some(false) {
            return Err(cfg_err(
                "seed-free must be true: the solver has no random state".into(),
            ));
        }

        let yi = match self.example1_yi.as_deref() {
            None | Some("cos") => Example1Yi::Cos,
            Some("sin") => Example1Yi::Sin,
            Some(other) => {
                return Err(cfg_err(format!(
                    "example1_yi must be \"cos\" or \"sin\", got \"{other}\""
                )))
            }
        };

        let is_custom = matches!(&self.example, ExampleSel::Name(n) if n == "custom");
        if self.level_set.is_some() && !is_custom {
            return Err(cfg_err(
                "level_set is only accepted for example \"custom\"".into(),
            ));
        }

        let mut benchmark = match &self.example {
            ExampleSel::Number(1) => bench::example1_with(yi),
            ExampleSel::Number(2) => bench::example2_with(yi),
            ExampleSel::Number(3) => {
                let omega = self.omega.unwrap_or(31.0 * std::f64::consts::PI / 16.0);
                bench::example3(omega).map_err(|e| cfg_err(e.to_string()))?
            }
            ExampleSel::Number(4) => bench::example4(),
            ExampleSel::Number(n) => {
                return Err(cfg_err(format!("example must be 1..=4, got {n}")))
            }
            ExampleSel::Name(n) if n == "custom" => {
                let spec = self.level_set.as_ref().ok_or_else(|| {
                    cfg_err("example \"custom\" requires a level_set".into())
                })?;
                spec.validate().map_err(cfg_err)?;
                let bbox = self.bbox.ok_or_else(|| {
                    cfg_err("example \"custom\" requires a bbox".into())
                })?;
                bench::custom_benchmark(spec.to_expr(), bbox, self.n0.unwrap_or(16))
            }
            ExampleSel::Name(n) => {
                return Err(cfg_err(format!(
                    "example must be 1..=4 or \"custom\", got \"{n}\""
                )))
            }
        };

        if let Some(omega) = self.omega {
            if matches!(&self.example, ExampleSel::Number(4)) {
                // Example 4 keeps its manufactured solution; omega is fixed.
                let fixed = 31.0 * std::f64::consts::PI / 16.0;
                if (omega - fixed).abs() > 1e-12 {
                    return Err(cfg_err(
                        "example 4 has a fixed corner angle 31*pi/16".into(),
                    ));
                }
            }
        }

        if let Some(bbox) = self.bbox {
            if !(bbox[2] > bbox[0] && bbox[3] > bbox[1]) {
                return Err(cfg_err(format!("degenerate bbox {bbox:?}")));
            }
            benchmark.bbox = bbox;
        }
        if let Some(n0) = self.n0 {
            if n0 < 1 {
                return Err(cfg_err("n0 must be at least 1".into()));
            }
            benchmark.n0 = n0;
        }

        let mut config = benchmark.config.clone();
        if let Some(theta) = self.theta {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(cfg_err(format!("theta = {theta} must lie in (0, 1]")));
            }
            config.theta = theta;
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0) {
                return Err(cfg_err(format!("beta = {beta} must be positive")));
            }
            config.beta = beta;
        }
        if let Some(gamma) = self.gamma {
            if !(gamma >= 0.0) {
                return Err(cfg_err(format!("gamma = {gamma} must be non-negative")));
            }
            config.gamma = gamma;
        }
        if let Some(max_dofs) = self.max_dofs {
            config.max_dofs = max_dofs;
        }
        if let Some(max_steps) = self.max_steps {
            if max_steps == 0 {
                return Err(cfg_err("max_steps must be at least 1".into()));
            }
            config.max_steps = max_steps;
        }
        if let Some(with_bc) = self.with_bc {
            config.with_boundary_correction = with_bc;
        }
        match self.gh_mode.as_deref() {
            None => {}
            Some("linear") => config.gh_mode = GhMode::Linear,
            Some("constant") => config.gh_mode = GhMode::Constant,
            Some(other) => {
                return Err(cfg_err(format!(
                    "gh_mode must be \"linear\" or \"constant\", got \"{other}\""
                )))
            }
        }
        if let Some(uniform) = self.uniform {
            config.uniform = uniform;
        }
        if let Some(v) = self.vtk_every {
            config.vtk_every = v;
        }

        benchmark.config = config.clone();
        Ok(ResolvedConfig { benchmark, config })
    }
}
