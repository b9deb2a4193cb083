//! Polygonal meshes with edge incidence, boundary labels and geometry.

mod generators;
mod graded;
mod io;

pub use generators::{build_cartesian_mesh, build_hole_mesh, Rect, SideLabels};
pub use graded::{build_graded_mesh, GradedMesh, GradedMeshSpec};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{area_centroid, diameter, is_simple, signed_area, Point};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryLabel {
    Dirichlet,
    Neumann,
    Robin,
    /// Scatterer boundary; the problem decides Dirichlet or Neumann.
    Scatterer,
}

impl BoundaryLabel {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Dirichlet => "D",
            Self::Neumann => "N",
            Self::Robin => "R",
            Self::Scatterer => "Sc",
        }
    }
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BoundaryLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "D" => Ok(Self::Dirichlet),
            "N" => Ok(Self::Neumann),
            "R" => Ok(Self::Robin),
            "Sc" => Ok(Self::Scatterer),
            other => Err(format!("unknown boundary label `{other}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge ({0}, {1}) is shared by more than two elements or traversed twice in the same direction")]
    NonManifold(usize, usize),
    #[error("element {0} is not a simple counterclockwise polygon")]
    Orientation(usize),
    #[error("boundary edge ({0}, {1}) has no label")]
    Unlabeled(usize, usize),
    #[error("label given for ({0}, {1}) which is not a boundary edge")]
    StrayLabel(usize, usize),
    #[error("element {0} references missing vertex {1}")]
    MissingVertex(usize, usize),
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone, Debug)]
pub struct Edge<T> {
    /// Endpoints with `v[0] < v[1]`.
    pub v: [usize; 2],
    /// Adjacent elements, lower id first.
    pub elements: Vec<usize>,
    pub label: Option<BoundaryLabel>,
    pub length: T,
    pub midpoint: Point<T>,
    /// Unit normal pointing out of `elements[0]`.
    pub normal: Point<T>,
}

impl<T> Edge<T> {
    pub fn is_boundary(&self) -> bool {
        self.elements.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct Element<T> {
    /// Counterclockwise vertex ids.
    pub vertices: Vec<usize>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i+1]`.
    pub edges: Vec<usize>,
    pub centroid: Point<T>,
    pub diameter: T,
    pub area: T,
}

#[derive(Clone, Debug)]
pub struct PolygonalMesh<T> {
    pub vertices: Vec<Point<T>>,
    pub elements: Vec<Element<T>>,
    /// Sorted by the canonical key (min vertex, max vertex).
    pub edges: Vec<Edge<T>>,
    /// max h_K.
    pub h: T,
}

impl<T: Real> PolygonalMesh<T> {
    /// Builds incidence and geometry, checking orientation, manifoldness and
    /// that every boundary edge carries exactly one label.
    pub fn from_parts(
        vertices: Vec<Point<T>>,
        polygons: Vec<Vec<usize>>,
        labels: &BTreeMap<(usize, usize), BoundaryLabel>,
    ) -> Result<Self, MeshError> {
        // directed edge -> element; undirected key -> adjacency
        let mut adj: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (e, poly) in polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(MeshError::Orientation(e));
            }
            for &v in poly {
                if v >= vertices.len() {
                    return Err(MeshError::MissingVertex(e, v));
                }
            }
            let pts: Vec<Point<T>> = poly.iter().map(|&v| vertices[v]).collect();
            if signed_area(&pts) <= T::zero() || !is_simple(&pts) {
                return Err(MeshError::Orientation(e));
            }
            for i in 0..poly.len() {
                let a = poly[i];
                let b = poly[(i + 1) % poly.len()];
                if a == b {
                    return Err(MeshError::Orientation(e));
                }
                let key = (a.min(b), a.max(b));
                adj.entry(key).or_default().push((e, a < b));
            }
        }
        let mut edges = Vec::with_capacity(adj.len());
        let mut index = BTreeMap::new();
        for (&(a, b), inc) in &adj {
            match inc.len() {
                1 => {}
                2 => {
                    if inc[0].1 == inc[1].1 {
                        return Err(MeshError::Orientation(inc[1].0));
                    }
                }
                _ => return Err(MeshError::NonManifold(a, b)),
            }
            let label = labels.get(&(a, b)).copied();
            if inc.len() == 1 && label.is_none() {
                return Err(MeshError::Unlabeled(a, b));
            }
            if inc.len() == 2 && label.is_some() {
                return Err(MeshError::StrayLabel(a, b));
            }
            let mut els: Vec<(usize, bool)> = inc.clone();
            els.sort();
            let forward = els[0].1;
            let (pa, pb) = (vertices[a], vertices[b]);
            let length = pa.dist(pb);
            // traversal direction of the first element is its CCW direction
            let t = if forward { pb - pa } else { pa - pb };
            let normal = Point::new(t.y, -t.x).scale(T::one() / length);
            index.insert((a, b), edges.len());
            edges.push(Edge {
                v: [a, b],
                elements: els.iter().map(|&(e, _)| e).collect(),
                label,
                length,
                midpoint: pa.midpoint(pb),
                normal,
            });
        }
        for &(a, b) in labels.keys() {
            if !index.contains_key(&(a, b)) {
                return Err(MeshError::StrayLabel(a, b));
            }
        }
        let elements: Vec<Element<T>> = polygons
            .into_iter()
            .map(|poly| {
                let pts: Vec<Point<T>> = poly.iter().map(|&v| vertices[v]).collect();
                let n = poly.len();
                let edges = (0..n)
                    .map(|i| {
                        let a = poly[i];
                        let b = poly[(i + 1) % n];
                        index[&(a.min(b), a.max(b))]
                    })
                    .collect();
                Element {
                    edges,
                    centroid: area_centroid(&pts),
                    diameter: diameter(&pts),
                    area: signed_area(&pts),
                    vertices: poly,
                }
            })
            .collect();
        let h = elements.iter().map(|e| e.diameter).fold(T::zero(), T::max);
        Ok(Self { vertices, elements, edges, h })
    }

    pub fn element_points(&self, k: usize) -> Vec<Point<T>> {
        self.elements[k].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Endpoints of local edge `i` of element `k` in counterclockwise order.
    pub fn local_edge_endpoints(&self, k: usize, i: usize) -> (Point<T>, Point<T>) {
        let vs = &self.elements[k].vertices;
        (self.vertices[vs[i]], self.vertices[vs[(i + 1) % vs.len()]])
    }

    /// Outward unit normal of local edge `i` of element `k`.
    pub fn local_normal(&self, k: usize, i: usize) -> Point<T> {
        let (a, b) = self.local_edge_endpoints(k, i);
        let t = b - a;
        Point::new(t.y, -t.x).scale(T::one() / t.norm())
    }

    pub fn edge_endpoints(&self, e: usize) -> (Point<T>, Point<T>) {
        let [a, b] = self.edges[e].v;
        (self.vertices[a], self.vertices[b])
    }

    pub fn total_area(&self) -> T {
        self.elements.iter().fold(T::zero(), |s, e| s + e.area)
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_boundary())
    }

    /// Replaces labels of boundary edges through `f(label, midpoint, normal)`.
    pub fn relabel(&mut self, f: impl Fn(BoundaryLabel, Point<T>, Point<T>) -> BoundaryLabel) {
        for e in &mut self.edges {
            if let Some(l) = e.label {
                e.label = Some(f(l, e.midpoint, e.normal));
            }
        }
    }

    pub fn labels(&self) -> BTreeMap<(usize, usize), BoundaryLabel> {
        self.edges
            .iter()
            .filter_map(|e| e.label.map(|l| ((e.v[0], e.v[1]), l)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> (Vec<Point<f64>>, BTreeMap<(usize, usize), BoundaryLabel>) {
        let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let mut l = BTreeMap::new();
        for key in [(0, 1), (1, 2), (0, 2)] {
            l.insert(key, BoundaryLabel::Robin);
        }
        (v, l)
    }

    #[test]
    fn single_triangle() {
        let (v, l) = tri();
        let m = PolygonalMesh::from_parts(v, vec![vec![0, 1, 2]], &l).unwrap();
        assert_eq!(m.elements.len(), 1);
        assert_eq!(m.boundary_edges().count(), 3);
        for e in &m.edges {
            assert!((e.normal.norm() - 1.0).abs() < 1e-14);
            // outward: normal points away from the centroid
            assert!((e.midpoint - m.elements[0].centroid).dot(e.normal) > 0.0);
        }
    }

    #[test]
    fn clockwise_is_rejected() {
        let (v, l) = tri();
        let r = PolygonalMesh::from_parts(v, vec![vec![0, 2, 1]], &l);
        assert_eq!(r.unwrap_err(), MeshError::Orientation(0));
    }

    #[test]
    fn duplicate_incidence_is_rejected() {
        let (v, l) = tri();
        let r = PolygonalMesh::from_parts(v, vec![vec![0, 1, 2], vec![0, 1, 2]], &l);
        assert!(r.is_err());
    }

    #[test]
    fn unlabeled_boundary_is_rejected() {
        let (v, mut l) = tri();
        l.remove(&(1, 2));
        let r = PolygonalMesh::from_parts(v, vec![vec![0, 1, 2]], &l);
        assert_eq!(r.unwrap_err(), MeshError::Unlabeled(1, 2));
    }
}
