//! Conforming triangulation of the background domain with newest-vertex
//! bisection refinement.
//!
//! Each triangle carries a `peak` index: the refinement edge is the edge
//! opposite `v[peak]`. Bisection inserts the midpoint of the refinement
//! edge, connects it to the peak vertex and makes the midpoint the peak of
//! both children, which is the classical newest-vertex rule and keeps the
//! mesh within a bounded number of similarity classes. Conformity is
//! maintained by recursively refining the neighbor across an incompatible
//! refinement edge before splitting.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::vec2::{dist, midpoint, signed_area_x2, Point};

static MESH_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, Debug)]
pub struct Triangle {
    /// Vertex indices, positively oriented.
    pub v: [usize; 3],
    /// Index into `v` of the vertex opposite the refinement edge.
    pub peak: usize,
    /// Bisection depth; the background mesh is generation 0.
    pub generation: u32,
}

impl Triangle {
    /// Sorted vertex pair of the refinement edge.
    pub fn refinement_edge(&self) -> (usize, usize) {
        let a = self.v[(self.peak + 1) % 3];
        let b = self.v[(self.peak + 2) % 3];
        (a.min(b), a.max(b))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Facet {
    /// Sorted vertex pair.
    pub v: [usize; 2],
    pub owner: usize,
    pub neighbor: Option<usize>,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.neighbor.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<Triangle>,
    pub facets: Vec<Facet>,
    /// Facet index of local edge `(i, i+1)` for each triangle.
    pub triangle_facets: Vec<[usize; 3]>,
    /// Number of `refine` applications since the background mesh.
    pub generation: u32,
    id: u64,
}

impl TriMesh {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let v = self.triangles[t].v;
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    /// Element diameter: the longest edge.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
    }

    pub fn area(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        0.5 * signed_area_x2(p[0], p[1], p[2])
    }

    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let a = crate::vec2::sub(p[(i + 1) % 3], p[i]);
                let b = crate::vec2::sub(p[(i + 2) % 3], p[i]);
                let ang = crate::vec2::cross(a, b)
                    .atan2(crate::vec2::dot(a, b));
                min = min.min(ang.abs());
            }
        }
        min
    }

    fn from_parts(vertices: Vec<Point>, triangles: Vec<Triangle>, generation: u32) -> Self {
        let (facets, triangle_facets) = build_facets(&vertices, &triangles);
        TriMesh {
            vertices,
            triangles,
            facets,
            triangle_facets,
            generation,
            id: MESH_ID.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// Construct a mesh from raw arrays; used by tests and file import.
    pub fn from_raw(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        let tris = triangles
            .into_iter()
            .map(|v| {
                let pts = [vertices[v[0]], vertices[v[1]], vertices[v[2]]];
                assert!(
                    signed_area_x2(pts[0], pts[1], pts[2]) > 0.0,
                    "triangles must be positively oriented"
                );
                // Longest edge becomes the refinement edge.
                let lens = [
                    dist(pts[1], pts[2]),
                    dist(pts[2], pts[0]),
                    dist(pts[0], pts[1]),
                ];
                let peak = (0..3)
                    .max_by(|&a, &b| lens[a].total_cmp(&lens[b]))
                    .unwrap();
                Triangle {
                    v,
                    peak,
                    generation: 0,
                }
            })
            .collect();
        Self::from_parts(vertices, tris, 0)
    }

    /// Audit the facet structure: every facet has one or two incident
    /// triangles, two exactly when interior, and indices are consistent.
    pub fn facet_audit(&self) -> bool {
        let mut incidence = vec![0usize; self.facets.len()];
        for (t, tf) in self.triangle_facets.iter().enumerate() {
            for (e, &f) in tf.iter().enumerate() {
                let tri = &self.triangles[t];
                let a = tri.v[e];
                let b = tri.v[(e + 1) % 3];
                let key = [a.min(b), a.max(b)];
                if self.facets[f].v != key {
                    return false;
                }
                if self.facets[f].owner != t && self.facets[f].neighbor != Some(t) {
                    return false;
                }
                incidence[f] += 1;
            }
        }
        incidence
            .iter()
            .zip(&self.facets)
            .all(|(&n, f)| n == if f.is_interior() { 2 } else { 1 })
    }
}

fn build_facets(
    _vertices: &[Point],
    triangles: &[Triangle],
) -> (Vec<Facet>, Vec<[usize; 3]>) {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut facets: Vec<Facet> = Vec::new();
    let mut triangle_facets = vec![[usize::MAX; 3]; triangles.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for e in 0..3 {
            let a = tri.v[e];
            let b = tri.v[(e + 1) % 3];
            let key = (a.min(b), a.max(b));
            match index.get(&key) {
                Some(&f) => {
                    debug_assert!(facets[f].neighbor.is_none(), "non-manifold facet");
                    facets[f].neighbor = Some(t);
                    triangle_facets[t][e] = f;
                }
                None => {
                    let f = facets.len();
                    facets.push(Facet {
                        v: [key.0, key.1],
                        owner: t,
                        neighbor: None,
                    });
                    index.insert(key, f);
                    triangle_facets[t][e] = f;
                }
            }
        }
    }
    (facets, triangle_facets)
}

/// Structured background mesh: an `n x n` grid of squares on the bounding
/// box, each split into two triangles by the same diagonal. Refinement
/// edges start on the diagonals (the longest edges), which makes the
/// initial labeling compatible for newest-vertex bisection.
pub fn build_background_mesh(bbox: [f64; 4], n: usize) -> TriMesh {
    assert!(n >= 1, "background resolution must be at least 1");
    let [xmin, ymin, xmax, ymax] = bbox;
    assert!(xmax > xmin && ymax > ymin, "degenerate bounding box");

    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([
                xmin + (xmax - xmin) * i as f64 / n as f64,
                ymin + (ymax - ymin) * j as f64 / n as f64,
            ]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (p00, p10) = (vid(i, j), vid(i + 1, j));
            let (p11, p01) = (vid(i + 1, j + 1), vid(i, j + 1));
            // Diagonal p00 - p11; the peak vertex sits opposite it.
            triangles.push(Triangle {
                v: [p00, p10, p11],
                peak: 1,
                generation: 0,
            });
            triangles.push(Triangle {
                v: [p00, p11, p01],
                peak: 2,
                generation: 0,
            });
        }
    }
    TriMesh::from_parts(vertices, triangles, 0)
}

struct RefineWork {
    vertices: Vec<Point>,
    tris: Vec<Triangle>,
    alive: Vec<bool>,
    /// Alive triangles incident to each (sorted) edge.
    edge_tris: HashMap<(usize, usize), Vec<usize>>,
    midpoints: HashMap<(usize, usize), usize>,
}

impl RefineWork {
    fn edge_key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    fn attach(&mut self, t: usize) {
        let v = self.tris[t].v;
        for e in 0..3 {
            let key = Self::edge_key(v[e], v[(e + 1) % 3]);
            self.edge_tris.entry(key).or_default().push(t);
        }
    }

    fn detach(&mut self, t: usize) {
        let v = self.tris[t].v;
        for e in 0..3 {
            let key = Self::edge_key(v[e], v[(e + 1) % 3]);
            if let Some(list) = self.edge_tris.get_mut(&key) {
                list.retain(|&x| x != t);
            }
        }
    }

    fn neighbor_across(&self, t: usize, edge: (usize, usize)) -> Option<usize> {
        self.edge_tris
            .get(&edge)?
            .iter()
            .copied()
            .find(|&x| x != t && self.alive[x])
    }

    fn midpoint_of(&mut self, edge: (usize, usize)) -> usize {
        if let Some(&m) = self.midpoints.get(&edge) {
            return m;
        }
        let m = self.vertices.len();
        self.vertices
            .push(midpoint(self.vertices[edge.0], self.vertices[edge.1]));
        self.midpoints.insert(edge, m);
        m
    }

    /// Split `t` across its refinement edge using midpoint vertex `m`.
    fn split(&mut self, t: usize, m: usize) -> (usize, usize) {
        let tri = self.tris[t];
        let peak = tri.v[tri.peak];
        let a = tri.v[(tri.peak + 1) % 3];
        let b = tri.v[(tri.peak + 2) % 3];
        self.detach(t);
        self.alive[t] = false;

        // Children keep the parent's orientation; the new vertex is the peak.
        let c1 = Triangle {
            v: [m, peak, a],
            peak: 0,
            generation: tri.generation + 1,
        };
        let c2 = Triangle {
            v: [m, b, peak],
            peak: 0,
            generation: tri.generation + 1,
        };
        let i1 = self.tris.len();
        self.tris.push(c1);
        self.alive.push(true);
        self.attach(i1);
        let i2 = self.tris.len();
        self.tris.push(c2);
        self.alive.push(true);
        self.attach(i2);
        (i1, i2)
    }

    /// Bisect the refinement edge of `t`, recursively making the neighbor
    /// compatible first. Terminates because each recursive call operates on
    /// a triangle of strictly smaller generation than its successor child.
    fn bisect(&mut self, t: usize) {
        if !self.alive[t] {
            return;
        }
        loop {
            let edge = self.tris[t].refinement_edge();
            match self.neighbor_across(t, edge) {
                None => {
                    let m = self.midpoint_of(edge);
                    self.split(t, m);
                    return;
                }
                Some(n) if self.tris[n].refinement_edge() == edge => {
                    let m = self.midpoint_of(edge);
                    self.split(t, m);
                    self.split(n, m);
                    return;
                }
                Some(n) => {
                    // Neighbor's refinement edge differs: refine it first.
                    // One of its children then has `edge` as refinement edge.
                    self.bisect(n);
                }
            }
        }
    }
}

/// Bisect every marked triangle at least once, adding closure bisections
/// until the mesh is conforming again.
pub fn refine(mesh: &TriMesh, marked: &[usize]) -> TriMesh {
    if marked.is_empty() {
        return mesh.clone();
    }
    let mut work = RefineWork {
        vertices: mesh.vertices.clone(),
        tris: mesh.triangles.clone(),
        alive: vec![true; mesh.triangles.len()],
        edge_tris: HashMap::new(),
        midpoints: HashMap::new(),
    };
    for t in 0..work.tris.len() {
        work.attach(t);
    }

    let mut order: Vec<usize> = marked.to_vec();
    order.sort_unstable();
    order.dedup();
    for t in order {
        assert!(t < mesh.triangles.len(), "marked triangle out of range");
        // A closure bisection may have split it already, which counts.
        work.bisect(t);
    }

    let triangles: Vec<Triangle> = work
        .tris
        .into_iter()
        .zip(work.alive)
        .filter_map(|(tri, alive)| alive.then_some(tri))
        .collect();
    TriMesh::from_parts(work.vertices, triangles, mesh.generation + 1)
}
