//! Conforming 2D triangulations with boundary and material tags.
//!
//! Triangles are stored counterclockwise. Local edge `i` is the edge opposite
//! local vertex `i`, so local edge 0 (vertices 1 and 2) is the refinement edge
//! used by newest-vertex bisection and vertex 0 is the newest vertex.

mod generate;
mod quality;
mod refine;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use generate::{generate_unit_square, MaterialSplit, SideTags, SplitAxis};
pub use quality::{shape_regularity, triangle_angles, ShapeRegularity};
pub use refine::refine;

pub type Point = [f64; 2];

/// Boundary condition carried by a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FacetKind {
    Interior,
    Dirichlet,
    Neumann,
}

/// An edge of the triangulation.
///
/// `left` is the lower element id; for interior facets `right` holds the
/// higher one and `normal` points from `left` into `right`. Boundary facets
/// have `right == None` and an outward normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 2],
    pub left: usize,
    pub left_edge: usize,
    pub right: Option<usize>,
    pub right_edge: Option<usize>,
    pub normal: Point,
    pub kind: FacetKind,
    pub length: f64,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

/// Affine map from the reference triangle (0,0),(1,0),(0,1).
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns are `v1 - v0` and `v2 - v0`.
    pub jacobian: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(v: [Point; 3]) -> Self {
        let j = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inverse = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        Self {
            origin: v[0],
            jacobian: j,
            inverse,
            det,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let g = &self.inverse;
        [g[0][0] * d[0] + g[0][1] * d[1], g[1][0] * d[0] + g[1][1] * d[1]]
    }

    /// Maps a reference gradient to the physical one (`J^{-T} g`).
    pub fn map_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let inv = &self.inverse;
        [inv[0][0] * g[0] + inv[1][0] * g[1], inv[0][1] * g[0] + inv[1][1] * g[1]]
    }

    /// Maps a reference Hessian to the physical one (`J^{-T} H J^{-1}`).
    pub fn map_hessian(&self, h: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let inv = &self.inverse;
        let mut out = [[0.0; 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        s += inv[p][a] * h[p][q] * inv[q][b];
                    }
                }
                *entry = s;
            }
        }
        out
    }
}

/// Conforming triangulation. Immutable once built; refinement returns a new mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    materials: Vec<u32>,
    boundary: BTreeMap<[usize; 2], BoundaryTag>,
    facets: Vec<Facet>,
    element_facets: Vec<[usize; 3]>,
    diameters: Vec<f64>,
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn local_edge(tri: &[usize; 3], i: usize) -> (usize, usize) {
    (tri[(i + 1) % 3], tri[(i + 2) % 3])
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Builds a mesh and its facet table.
    ///
    /// Every edge with a single incident triangle must carry a boundary tag,
    /// which also rejects hanging nodes.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        materials: Vec<u32>,
        boundary_tags: impl IntoIterator<Item = ([usize; 2], BoundaryTag)>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        if materials.len() != triangles.len() {
            return Err(Error::Mesh(format!(
                "{} material ids for {} triangles",
                materials.len(),
                triangles.len()
            )));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "triangle {t} references vertex {v} but only {} vertices exist",
                    vertices.len()
                )));
            }
            let g = ElementGeometry::new(tri.map(|v| vertices[v]));
            if !(g.det > 0.0) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has non-positive signed area {}",
                    g.area()
                )));
            }
        }

        let mut boundary = BTreeMap::new();
        for ([a, b], tag) in boundary_tags {
            if a >= vertices.len() || b >= vertices.len() || a == b {
                return Err(Error::Mesh(format!("invalid boundary edge ({a}, {b})")));
            }
            boundary.insert(edge_key(a, b), tag);
        }

        let mut edge_owner: HashMap<[usize; 2], usize> = HashMap::new();
        let mut facets: Vec<Facet> = Vec::new();
        let mut element_facets = vec![[usize::MAX; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = local_edge(tri, i);
                let key = edge_key(a, b);
                match edge_owner.get(&key) {
                    None => {
                        let (pa, pb) = (vertices[a], vertices[b]);
                        let length = distance(pa, pb);
                        // CCW traversal a -> b: the outward normal is the tangent rotated clockwise.
                        let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                        edge_owner.insert(key, facets.len());
                        element_facets[t][i] = facets.len();
                        facets.push(Facet {
                            vertices: [a, b],
                            left: t,
                            left_edge: i,
                            right: None,
                            right_edge: None,
                            normal,
                            kind: FacetKind::Neumann,
                            length,
                        });
                    }
                    Some(&f) => {
                        let facet = &mut facets[f];
                        if facet.right.is_some() {
                            return Err(Error::Mesh(format!(
                                "edge ({a}, {b}) is shared by more than two triangles"
                            )));
                        }
                        if facet.vertices != [b, a] {
                            return Err(Error::Mesh(format!(
                                "triangles {} and {t} traverse edge ({a}, {b}) in the same direction",
                                facet.left
                            )));
                        }
                        facet.right = Some(t);
                        facet.right_edge = Some(i);
                        facet.kind = FacetKind::Interior;
                        element_facets[t][i] = f;
                    }
                }
            }
        }

        for facet in facets.iter_mut() {
            let key = edge_key(facet.vertices[0], facet.vertices[1]);
            match (facet.right, boundary.get(&key)) {
                (Some(_), Some(_)) => {
                    return Err(Error::Mesh(format!(
                        "interior edge ({}, {}) carries a boundary tag",
                        key[0], key[1]
                    )))
                }
                (Some(_), None) => {}
                (None, Some(tag)) => {
                    facet.kind = match tag {
                        BoundaryTag::Dirichlet => FacetKind::Dirichlet,
                        BoundaryTag::Neumann => FacetKind::Neumann,
                    }
                }
                (None, None) => {
                    return Err(Error::Mesh(format!(
                        "boundary edge ({}, {}) has no tag (missing tag or hanging node)",
                        key[0], key[1]
                    )))
                }
            }
        }
        if boundary.len() != facets.iter().filter(|f| !f.is_interior()).count() {
            return Err(Error::Mesh(
                "boundary tags reference edges that are not triangle edges".into(),
            ));
        }

        let diameters = triangles
            .iter()
            .map(|tri| {
                (0..3)
                    .map(|i| {
                        let (a, b) = local_edge(tri, i);
                        distance(vertices[a], vertices[b])
                    })
                    .fold(0.0, f64::max)
            })
            .collect();

        Ok(Self {
            vertices,
            triangles,
            materials,
            boundary,
            facets,
            element_facets,
            diameters,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn materials(&self) -> &[u32] {
        &self.materials
    }

    pub fn material(&self, element: usize) -> u32 {
        self.materials[element]
    }

    pub fn boundary_tags(&self) -> &BTreeMap<[usize; 2], BoundaryTag> {
        &self.boundary
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Facet index of each local edge of `element`.
    pub fn element_facets(&self, element: usize) -> [usize; 3] {
        self.element_facets[element]
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn element_vertices(&self, element: usize) -> [Point; 3] {
        self.triangles[element].map(|v| self.vertices[v])
    }

    pub fn geometry(&self, element: usize) -> ElementGeometry {
        ElementGeometry::new(self.element_vertices(element))
    }

    pub fn area(&self, element: usize) -> f64 {
        self.geometry(element).area()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.area(e)).sum()
    }

    /// Element diameter `h_K` (longest edge).
    pub fn diameter(&self, element: usize) -> f64 {
        self.diameters[element]
    }

    pub fn h_max(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.diameters.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self, element: usize) -> Point {
        let v = self.element_vertices(element);
        [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0]
    }

    /// Diameter of the vertex bounding box.
    pub fn domain_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    pub fn count_facets(&self, kind: FacetKind) -> usize {
        self.facets.iter().filter(|f| f.kind == kind).count()
    }

    pub fn has_dirichlet(&self) -> bool {
        self.count_facets(FacetKind::Dirichlet) > 0
    }

    /// Returns a copy with every material id passed through `f`.
    pub fn with_materials(&self, f: impl Fn(usize, u32) -> u32) -> Self {
        let mut out = self.clone();
        for (e, m) in out.materials.iter_mut().enumerate() {
            *m = f(e, *m);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Mesh {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let tags = [
            ([0, 1], BoundaryTag::Dirichlet),
            ([1, 2], BoundaryTag::Neumann),
            ([2, 3], BoundaryTag::Neumann),
            ([3, 0], BoundaryTag::Neumann),
        ];
        Mesh::new(vertices, vec![[1, 2, 0], [3, 0, 2]], vec![0, 0], tags).unwrap()
    }

    #[test]
    fn facet_table_of_two_triangles() {
        let m = two_triangles();
        assert_eq!(m.facets().len(), 5);
        assert_eq!(m.count_facets(FacetKind::Interior), 1);
        assert_eq!(m.count_facets(FacetKind::Dirichlet), 1);
        assert_eq!(m.count_facets(FacetKind::Neumann), 3);
        let interior = m.facets().iter().find(|f| f.is_interior()).unwrap();
        assert_eq!((interior.left, interior.right), (0, Some(1)));
        // normal from element 0 (below the diagonal) towards element 1
        let c0 = m.centroid(0);
        let c1 = m.centroid(1);
        let d = [c1[0] - c0[0], c1[1] - c0[1]];
        assert!(d[0] * interior.normal[0] + d[1] * interior.normal[1] > 0.0);
    }

    #[test]
    fn boundary_normals_point_outward() {
        let m = two_triangles();
        for f in m.facets().iter().filter(|f| !f.is_interior()) {
            let c = m.centroid(f.left);
            let p = m.vertices()[f.vertices[0]];
            let d = [p[0] - c[0], p[1] - c[1]];
            assert!(d[0] * f.normal[0] + d[1] * f.normal[1] > 0.0);
        }
    }

    #[test]
    fn rejects_clockwise_triangle() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let tags = [
            ([0, 1], BoundaryTag::Neumann),
            ([1, 2], BoundaryTag::Neumann),
            ([2, 0], BoundaryTag::Neumann),
        ];
        let err = Mesh::new(vertices, vec![[0, 2, 1]], vec![0], tags).unwrap_err();
        assert!(err.to_string().contains("non-positive"));
    }

    #[test]
    fn rejects_untagged_boundary_edge() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let tags = [([0, 1], BoundaryTag::Neumann), ([1, 2], BoundaryTag::Neumann)];
        assert!(Mesh::new(vertices, vec![[0, 1, 2]], vec![0], tags).is_err());
    }

    #[test]
    fn rejects_empty_mesh() {
        assert!(Mesh::new(vec![], vec![], vec![], []).is_err());
    }

    #[test]
    fn geometry_round_trip() {
        let g = ElementGeometry::new([[0.3, 0.1], [1.2, 0.4], [0.5, 1.7]]);
        let x = g.to_physical([0.2, 0.3]);
        let xi = g.to_reference(x);
        assert!((xi[0] - 0.2).abs() < 1e-14 && (xi[1] - 0.3).abs() < 1e-14);
    }
}
