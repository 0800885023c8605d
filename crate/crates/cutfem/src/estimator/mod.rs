//! Residual a posteriori error estimation with boundary correction.

pub mod bc_mesh;
pub mod indicators;
pub mod oscillation;

pub use bc_mesh::{build_bc_mesh, BcMesh, BcTriangle, CellType, VertexTag};
pub use indicators::{compute_indicators, effectivity, IndicatorField};
pub use oscillation::{oscillation, Oscillation};
