//! Doerfler marking and the solve-estimate-mark-refine loop.

use std::time::Instant;

use crate::assembly::forms::{assemble, BoundaryField};
use crate::assembly::norms::energy_error;
use crate::assembly::{solve, FeSpace};
use crate::bench::{BenchmarkSpec, SourceMode};
use crate::error::{AmrError, RateError};
use crate::estimator::{build_bc_mesh, compute_indicators, oscillation, IndicatorField};
use crate::geometry::defect::unresolved_elements;
use crate::geometry::{interpolate_levelset, NodalField};
use crate::mesh::{build_background_mesh, extract_active, refine, CutTopology, TriMesh};
use crate::vec2::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhMode {
    Linear,
    Constant,
}

/// Driver configuration; the defaults are the penalty and marking values
/// used throughout the benchmark studies.
#[derive(Clone, Debug)]
pub struct AmrConfig {
    /// Doerfler bulk fraction.
    pub theta: f64,
    pub max_dofs: usize,
    pub max_steps: usize,
    pub with_boundary_correction: bool,
    pub beta: f64,
    pub gamma: f64,
    pub solver_tol: f64,
    pub gh_mode: GhMode,
    /// Mark every element instead of Doerfler marking; one step halves the
    /// mesh size (two bisection rounds).
    pub uniform: bool,
    /// Alternative reading of "refine rate ten percent": mark the top
    /// `theta` fraction of elements by count instead of the bulk criterion.
    pub count_fraction_marking: bool,
    /// Write a mesh snapshot every this many steps; 0 disables.
    pub vtk_every: usize,
}

impl Default for AmrConfig {
    fn default() -> Self {
        AmrConfig {
            theta: 0.1,
            max_dofs: 7000,
            max_steps: 100,
            with_boundary_correction: true,
            beta: 10.0,
            gamma: 0.1,
            solver_tol: 1e-10,
            gh_mode: GhMode::Linear,
            uniform: false,
            count_fraction_marking: false,
            vtk_every: 0,
        }
    }
}

/// Non-fatal per-step diagnostics.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepDiagnostics {
    pub skipped_boundary_segments: usize,
    pub bc_fallback_elements: usize,
    pub bc_downgraded_elements: usize,
    pub aligned_zero_facets: usize,
    pub isolated_cut_elements: usize,
    pub osc_thin_patches: usize,
    pub osc_outer_omitted: bool,
}

/// One row of the convergence history.
#[derive(Clone, Debug)]
pub struct AmrRecord {
    pub step: usize,
    pub ndof: usize,
    pub eta: f64,
    pub eta_residual: f64,
    pub eta_jump: f64,
    pub eta_nitsche: f64,
    pub eta_bc: f64,
    pub true_error: Option<f64>,
    pub effectivity: Option<f64>,
    pub osc: f64,
    pub cg_iters: usize,
    pub cond_est: f64,
    pub wall_s: f64,
    pub diagnostics: StepDiagnostics,
}

/// Everything an observer may want to snapshot at the end of a step.
pub struct StepSnapshot<'a> {
    pub mesh: &'a TriMesh,
    pub cut: &'a CutTopology,
    pub space: &'a FeSpace,
    pub solution: &'a crate::assembly::Solution,
    pub indicators: &'a IndicatorField,
    pub record: &'a AmrRecord,
}

/// Minimum-cardinality index set whose squared values carry a `theta`
/// fraction of the total, taking a prefix of the descending sort with ties
/// broken by ascending index. Returns ascending indices.
pub fn dorfler_select(eta_sq: &[f64], theta: f64) -> Vec<usize> {
    assert!(theta > 0.0 && theta <= 1.0, "theta must lie in (0, 1]");
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    // Total accumulated in sorted order so the theta = 1 prefix terminates
    // exactly at the last positive entry.
    let total: f64 = order.iter().map(|&i| eta_sq[i]).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut selected = Vec::new();
    let mut acc = 0.0;
    for &i in &order {
        if acc >= theta * total {
            break;
        }
        if eta_sq[i] <= 0.0 {
            break;
        }
        acc += eta_sq[i];
        selected.push(i);
    }
    selected.sort_unstable();
    selected
}

/// Top `ceil(theta * n)` positive entries by value; the count-fraction
/// alternative behind `count_fraction_marking`.
pub fn count_fraction_select(eta_sq: &[f64], theta: f64) -> Vec<usize> {
    assert!(theta > 0.0 && theta <= 1.0);
    let mut order: Vec<usize> = (0..eta_sq.len())
        .filter(|&i| eta_sq[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    let k = ((theta * eta_sq.len() as f64).ceil() as usize).min(order.len());
    let mut selected = order[..k].to_vec();
    selected.sort_unstable();
    selected
}

/// Doerfler marking on an indicator field; returns mesh triangle indices.
pub fn dorfler_mark(
    indicators: &IndicatorField,
    cut: &CutTopology,
    theta: f64,
) -> Vec<usize> {
    let eta_sq: Vec<f64> = indicators.eta_k.iter().map(|e| e * e).collect();
    dorfler_select(&eta_sq, theta)
        .into_iter()
        .map(|k| cut.active[k])
        .collect()
}

/// Field selector for rate fitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateField {
    Eta,
    TrueError,
    EtaBc,
    Osc,
}

impl RateField {
    fn value(&self, r: &AmrRecord) -> Option<f64> {
        match self {
            RateField::Eta => Some(r.eta),
            RateField::TrueError => r.true_error,
            RateField::EtaBc => Some(r.eta_bc),
            RateField::Osc => Some(r.osc),
        }
    }
}

/// Least-squares slope of `log(field)` against `log(ndof)` over the last
/// `window` records.
pub fn fit_rate(
    records: &[AmrRecord],
    field: RateField,
    window: usize,
) -> Result<f64, RateError> {
    let n = records.len().min(window);
    if n < 3 {
        return Err(RateError::TooFewRecords(n));
    }
    let tail = &records[records.len() - n..];
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for r in tail {
        let v = field.value(r).unwrap_or(-1.0);
        if v <= 0.0 {
            return Err(RateError::NonPositiveField {
                step: r.step,
                value: v,
            });
        }
        xs.push((r.ndof as f64).ln());
        ys.push(v.ln());
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let cov: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(cov / var)
}

/// Element-aware view of the source term for the configured mode.
pub enum EffectiveSource<'a> {
    Analytic(&'a BenchmarkSpec),
    ZeroOutsideDomain(&'a BenchmarkSpec),
    Nodal(&'a NodalField, &'a TriMesh),
}

impl EffectiveSource<'_> {
    pub fn eval(&self, t: usize, p: Point) -> f64 {
        match self {
            EffectiveSource::Analytic(b) => {
                b.level_set.source.as_ref().map_or(0.0, |f| f(p))
            }
            EffectiveSource::ZeroOutsideDomain(b) => {
                if b.level_set.evaluate(p) > 0.0 {
                    0.0
                } else {
                    b.level_set.source.as_ref().map_or(0.0, |f| f(p))
                }
            }
            EffectiveSource::Nodal(values, mesh) => values.eval_in_triangle(mesh, t, p),
        }
    }
}

/// Run the solve-estimate-mark-refine loop to the configured stopping
/// criteria, collecting one record per solved mesh.
pub fn adapt(
    problem: &BenchmarkSpec,
    config: &AmrConfig,
    mut observer: Option<&mut dyn FnMut(&StepSnapshot)>,
) -> Result<Vec<AmrRecord>, AmrError> {
    let mut current_mesh = build_background_mesh(problem.bbox, problem.n0);
    let mut records: Vec<AmrRecord> = Vec::new();

    for step in 0..config.max_steps.max(1) {
        let started = Instant::now();
        let mesh = &current_mesh;
        let phih = interpolate_levelset(&problem.level_set, mesh)?;
        let cut = extract_active(mesh, &phih)?;
        let space = FeSpace::build(mesh, &cut);
        let ndof = space.ndof();

        if step == 0 && ndof > config.max_dofs {
            return Err(AmrError::Config(format!(
                "initial mesh already has {ndof} dofs, above the cap {}",
                config.max_dofs
            )));
        }
        if let Some(prev) = records.last() {
            debug_assert!(ndof > prev.ndof, "dof count must increase");
        }

        let nodal_source = match problem.source_mode {
            SourceMode::NodalInterpolation => {
                let src = problem.level_set.source.clone();
                let values = mesh
                    .vertices
                    .iter()
                    .map(|&p| src.as_ref().map_or(0.0, |f| f(p)))
                    .collect();
                Some(NodalField::new(values, mesh))
            }
            _ => None,
        };
        let source = match problem.source_mode {
            SourceMode::Analytic => EffectiveSource::Analytic(problem),
            SourceMode::ZeroOutsideDomain => EffectiveSource::ZeroOutsideDomain(problem),
            SourceMode::NodalInterpolation => {
                EffectiveSource::Nodal(nodal_source.as_ref().unwrap(), mesh)
            }
        };
        let f_eff = |t: usize, p: Point| source.eval(t, p);

        let g_fn = |p: Point| (problem.g)(p);
        let g_h = match config.gh_mode {
            GhMode::Linear => BoundaryField::Linear(&g_fn),
            GhMode::Constant => BoundaryField::Constant(&g_fn),
        };

        let system = assemble(mesh, &cut, &space, &f_eff, &g_h, config.beta, config.gamma);
        let solution = match solve(&system, config.solver_tol, 10 * ndof.max(100)) {
            Ok(s) => s,
            Err(source) => {
                return Err(AmrError::Solver {
                    step,
                    source,
                    partial_records: records,
                })
            }
        };

        let bc = build_bc_mesh(
            mesh,
            &cut,
            &space,
            &problem.level_set,
            &solution.coeffs,
            &g_fn,
        );

        let indicators = compute_indicators(
            mesh,
            &cut,
            &space,
            &solution.coeffs,
            &f_eff,
            &g_h,
            &bc,
            config.with_boundary_correction,
        );

        let osc = oscillation(mesh, &cut, &phih, &f_eff, Some(&bc));

        let true_error = problem.level_set.exact_solution.as_ref().map(|ex| {
            let exact = |p: Point| ex(p);
            energy_error(&solution.coeffs, Some(&exact), mesh, &cut, &space, &bc)
                .expect("exact solution attached")
        });
        let effectivity = true_error.and_then(|e| {
            crate::estimator::effectivity(&indicators, e).ok()
        });

        let record = AmrRecord {
            step,
            ndof,
            eta: indicators.eta,
            eta_residual: indicators.eta_residual(),
            eta_jump: indicators.eta_jump(),
            eta_nitsche: indicators.eta_nitsche(),
            eta_bc: indicators.eta_bc(),
            true_error,
            effectivity,
            osc: osc.total,
            cg_iters: solution.iterations,
            cond_est: solution.condition_estimate,
            wall_s: started.elapsed().as_secs_f64(),
            diagnostics: StepDiagnostics {
                skipped_boundary_segments: system.skipped_boundary_segments,
                bc_fallback_elements: bc.fallback_elements.len(),
                bc_downgraded_elements: bc.downgraded_elements,
                aligned_zero_facets: cut.aligned_zero_facets.len(),
                isolated_cut_elements: cut.isolated_cut_elements.len(),
                osc_thin_patches: osc.thin_patches.len(),
                osc_outer_omitted: osc.outer_part_omitted,
            },
        };

        if let Some(ref mut obs) = observer {
            obs(&StepSnapshot {
                mesh,
                cut: &cut,
                space: &space,
                solution: &solution,
                indicators: &indicators,
                record: &record,
            });
        }
        records.push(record);

        // Stopping: estimator exactly zero, dof cap reached (checked after
        // the solve, so the cap bounds solved systems), or step budget.
        if indicators.eta == 0.0 {
            break;
        }
        if ndof > config.max_dofs {
            break;
        }
        if records.len() >= config.max_steps {
            break;
        }

        let next = if config.uniform {
            // Halve the mesh size: two rounds of full bisection.
            let all: Vec<usize> = (0..current_mesh.triangles.len()).collect();
            let once = refine(&current_mesh, &all);
            let all2: Vec<usize> = (0..once.triangles.len()).collect();
            refine(&once, &all2)
        } else {
            let eta_sq: Vec<f64> = indicators.eta_k.iter().map(|e| e * e).collect();
            let local = if config.count_fraction_marking {
                count_fraction_select(&eta_sq, config.theta)
            } else {
                dorfler_select(&eta_sq, config.theta)
            };
            if local.is_empty() {
                break;
            }
            let mut marked: Vec<usize> =
                local.into_iter().map(|k| cut.active[k]).collect();
            // Geometry safeguard: elements whose edges misrepresent the
            // exact level set are refined regardless of their indicator;
            // the residual estimator is blind to boundary pieces the
            // discrete geometry cannot express, and the reliability
            // analysis assumes they do not exist.
            marked.extend(unresolved_elements(&problem.level_set, mesh, &phih, 8));
            marked.sort_unstable();
            marked.dedup();
            refine(&current_mesh, &marked)
        };
        current_mesh = next;
    }

    Ok(records)
}
