//! Active-mesh extraction: classification of background elements against
//! the nodal level set, the cut-element set, and the ghost-facet set.

use crate::error::{GeometryError, MeshError};
use crate::geometry::clip::{classify_and_clip, ClipResult, ElementClass};
use crate::geometry::NodalField;
use crate::mesh::tri_mesh::TriMesh;

/// Relative snap tolerance for nodal values, scaled by the element diameter.
pub const SNAP_TOL_REL: f64 = 1e-12;

/// Active mesh, cut elements and ghost facets for one background mesh and
/// one nodal level set.
#[derive(Clone, Debug)]
pub struct CutTopology {
    /// Active triangle indices (inside or cut), ascending.
    pub active: Vec<usize>,
    /// Map from mesh triangle index to position in `active`.
    pub active_index: Vec<Option<usize>>,
    /// Cut triangle indices, ascending.
    pub cut: Vec<usize>,
    /// Clip result per active element, parallel to `active`.
    pub clips: Vec<ClipResult>,
    /// Ghost facet indices (interior facets whose closed element pair
    /// touches the approximate boundary), ascending.
    pub ghost_facets: Vec<usize>,
    /// Interior facets of the active mesh that lie entirely on the zero set
    /// (both endpoint values snapped to zero). On such facets the boundary
    /// is mesh-aligned and carries no Nitsche terms; reported as a
    /// diagnostic because Dirichlet data is not imposed there.
    pub aligned_zero_facets: Vec<usize>,
    /// Cut elements with no uncut active element in their vertex ring.
    /// The stabilized scheme needs a nearby interior element to lean on;
    /// isolated cut elements indicate an under-resolved mesh and are
    /// reported, never fatal.
    pub isolated_cut_elements: Vec<usize>,
    mesh_id: u64,
}

impl CutTopology {
    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn clip_of(&self, tri: usize) -> Option<&ClipResult> {
        self.active_index[tri].map(|k| &self.clips[k])
    }

    pub fn is_active(&self, tri: usize) -> bool {
        self.active_index[tri].is_some()
    }

    pub fn is_cut(&self, tri: usize) -> bool {
        self.clip_of(tri)
            .is_some_and(|c| c.class == ElementClass::Cut)
    }

    /// True when the facet is interior with respect to the active mesh.
    pub fn facet_is_interior(&self, mesh: &TriMesh, facet: usize) -> bool {
        let f = &mesh.facets[facet];
        match f.neighbor {
            Some(nb) => self.is_active(f.owner) && self.is_active(nb),
            None => false,
        }
    }
}

/// Classify every element of the background mesh and collect the active
/// mesh, the cut set and the ghost facets.
pub fn extract_active(
    mesh: &TriMesh,
    phih: &NodalField,
) -> Result<CutTopology, MeshError> {
    assert_eq!(
        phih.mesh_id(),
        mesh.id(),
        "nodal field belongs to a different mesh"
    );

    let mut active = Vec::new();
    let mut cut = Vec::new();
    let mut clips = Vec::new();
    let mut active_index = vec![None; mesh.triangles.len()];

    for t in 0..mesh.triangles.len() {
        let pts = mesh.triangle_points(t);
        let vals = [
            phih.values[mesh.triangles[t].v[0]],
            phih.values[mesh.triangles[t].v[1]],
            phih.values[mesh.triangles[t].v[2]],
        ];
        let snap = SNAP_TOL_REL * mesh.diameter(t);
        let clip = match classify_and_clip(pts, vals, snap) {
            Ok(c) => c,
            // A fully snapped-to-zero element sits entirely on the boundary;
            // treat it as outside (it has no interior on the negative side).
            Err(GeometryError::DegenerateCut) => continue,
            Err(e) => unreachable!("clip failed: {e}"),
        };
        match clip.class {
            ElementClass::Outside => {}
            ElementClass::Inside | ElementClass::Cut => {
                active_index[t] = Some(active.len());
                if clip.class == ElementClass::Cut {
                    cut.push(t);
                }
                active.push(t);
                clips.push(clip);
            }
        }
    }

    if active.is_empty() {
        return Err(MeshError::DomainNotFound);
    }

    let topo_partial = CutTopology {
        active,
        active_index,
        cut,
        clips,
        ghost_facets: Vec::new(),
        aligned_zero_facets: Vec::new(),
        isolated_cut_elements: Vec::new(),
        mesh_id: mesh.id(),
    };

    // Ghost facets: interior facets of the active mesh such that the closed
    // element pair intersects the zero set. An element touches the zero set
    // exactly when it is cut or carries a snapped-zero vertex.
    let mut ghost_facets = Vec::new();
    let mut aligned_zero_facets = Vec::new();
    for (f, facet) in mesh.facets.iter().enumerate() {
        if !topo_partial.facet_is_interior(mesh, f) {
            continue;
        }
        let touches = |t: usize| topo_partial.clip_of(t).unwrap().touches_boundary();
        let nb = facet.neighbor.unwrap();
        if touches(facet.owner) || touches(nb) {
            ghost_facets.push(f);
        }
        let zero_at = |t: usize, vertex: usize| {
            let tri = &mesh.triangles[t];
            let local = tri.v.iter().position(|&v| v == vertex).unwrap();
            topo_partial.clip_of(t).unwrap().snapped[local] == 0.0
        };
        if zero_at(facet.owner, facet.v[0]) && zero_at(facet.owner, facet.v[1]) {
            aligned_zero_facets.push(f);
        }
    }

    // Cut elements without an uncut active element sharing one of their
    // vertices (the vertex ring spans a distance of order h_K).
    let mut uncut_at_vertex = vec![false; mesh.vertices.len()];
    for &t in &topo_partial.active {
        if !topo_partial.is_cut(t) {
            for &v in &mesh.triangles[t].v {
                uncut_at_vertex[v] = true;
            }
        }
    }
    let isolated_cut_elements: Vec<usize> = topo_partial
        .cut
        .iter()
        .copied()
        .filter(|&t| !mesh.triangles[t].v.iter().any(|&v| uncut_at_vertex[v]))
        .collect();

    Ok(CutTopology {
        ghost_facets,
        aligned_zero_facets,
        isolated_cut_elements,
        ..topo_partial
    })
}
