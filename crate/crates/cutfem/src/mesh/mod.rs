//! Background triangulation, adaptive bisection and active-mesh extraction.

pub mod cut_topology;
pub mod tri_mesh;

pub use cut_topology::{extract_active, CutTopology, SNAP_TOL_REL};
pub use tri_mesh::{build_background_mesh, refine, Facet, TriMesh, Triangle};
