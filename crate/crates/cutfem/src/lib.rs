//! Adaptive cut finite element solver for the Poisson problem on domains
//! defined by level sets.
//!
//! The background mesh is a structured triangulation of a bounding box; the
//! physical domain cuts arbitrarily through it. Dirichlet data is imposed
//! weakly with Nitsche's method, a ghost penalty stabilizes the cut zone,
//! and a residual a posteriori estimator with a boundary-correction term
//! drives Doerfler-marked newest-vertex bisection.
//!
//! Module map:
//! - [`geometry`]: level sets, nodal interpolation, clipping, quadrature
//! - [`mesh`]: background mesh, bisection refinement, active mesh
//! - [`assembly`]: forms, sparse system, preconditioned CG, energy norms
//! - [`estimator`]: element indicators, boundary-correction mesh, oscillation
//! - [`amr`]: marking, the solve-estimate-mark-refine driver, rate fits
//! - [`bench`]: the four benchmark problems
//! - [`config`] / [`output`] / [`runner`]: run configuration and file I/O

pub mod amr;
pub mod assembly;
pub mod bench;
pub mod config;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod mesh;
pub mod output;
pub mod runner;
pub mod vec2;

pub use vec2::Point;
