//! Assembly and solution of the cut finite element system.

pub mod forms;
pub mod norms;
pub mod space;
pub mod sparse;

pub use forms::{assemble, BoundaryField, LinearSystem, SourceField};
pub use norms::{discrete_energy_norm, energy_error};
pub use space::FeSpace;
pub use sparse::{condition_probe, pcg_solve, CgResult, CsrMatrix};

use crate::error::SolveError;

/// Solution of the discrete system with solver diagnostics.
#[derive(Clone, Debug)]
pub struct Solution {
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub ritz_min: f64,
    pub ritz_max: f64,
    pub condition_estimate: f64,
}

/// Solve the assembled system with diagonally preconditioned CG.
pub fn solve(
    system: &LinearSystem,
    tol: f64,
    max_iter: usize,
) -> Result<Solution, SolveError> {
    let r = pcg_solve(&system.matrix, &system.rhs, tol, max_iter)?;
    Ok(Solution {
        coeffs: r.x,
        iterations: r.iterations,
        relative_residual: r.relative_residual,
        ritz_min: r.ritz_min,
        ritz_max: r.ritz_max,
        condition_estimate: r.condition_estimate,
    })
}
