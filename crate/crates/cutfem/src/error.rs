//! Error types shared across the solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("level set evaluated to a non-finite value at vertex {vertex} ({x}, {y})")]
    NonFiniteLevelSet { vertex: usize, x: f64, y: f64 },

    #[error("all three nodal values snapped to zero: degenerate cut element")]
    DegenerateCut,

    #[error("quadrature order {0} outside the supported range 1..=5")]
    UnsupportedOrder(usize),

    #[error("nodal field was built on a different mesh (expected id {expected}, got {got})")]
    MeshMismatch { expected: u64, got: u64 },
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("no active element found: the level set is positive on the whole background mesh")]
    DomainNotFound,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(
        "conjugate gradients did not converge in {iterations} iterations \
         (relative residual {relative_residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        relative_residual: f64,
    },

    #[error("conjugate gradients broke down at iteration {iteration}: p'Ap = {p_ap:.3e}")]
    Breakdown { iteration: usize, p_ap: f64 },
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("effectivity is undefined: the true error is zero to working precision")]
    UndefinedEffectivity,

    #[error("energy error requested but the benchmark has no exact solution attached")]
    MissingExactSolution,
}

#[derive(Debug, Error)]
pub enum RateError {
    #[error("rate fit needs at least 3 records in the window, got {0}")]
    TooFewRecords(usize),

    #[error("rate fit undefined: field value {value:.3e} at step {step} is not positive")]
    NonPositiveField { step: usize, value: f64 },
}

#[derive(Debug, Error)]
pub enum AmrError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Mesh(#[from] MeshError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    /// Carries the records of the steps completed before the failure.
    #[error("solver failed at step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: SolveError,
        partial_records: Vec<crate::amr::AmrRecord>,
    },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
