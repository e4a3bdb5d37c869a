use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances;

pub type Point3 = Vector3<f64>;

/// Face shapes admitted by the 3D construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FaceShape {
    Triangle,
    Parallelogram,
}

/// Class of a directed vertex pair `(i, j)`, `i != j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SegmentClass {
    /// A natural edge of the polyhedron.
    Edge,
    /// On the boundary (both ends in a common face) but not an edge.
    Surface,
    /// Through the interior.
    Interior,
}

/// A face loop with derived geometry. The loop is counterclockwise seen from
/// outside, so the right-hand rule gives the outward normal.
#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub normal: Point3,
    pub area: f64,
    pub centroid: Point3,
    pub shape: FaceShape,
    /// Edge ids of the loop steps `vertices[k] -> vertices[k + 1]`.
    pub edges: Vec<usize>,
    /// `+1` where the loop step agrees with the edge direction.
    pub edge_signs: Vec<i32>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Loop neighbours `(prev, next)` of vertex `v`, which must lie on the face.
    pub fn neighbours(&self, v: usize) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let k = self.vertices.iter().position(|&u| u == v)?;
        Some((self.vertices[(k + n - 1) % n], self.vertices[(k + 1) % n]))
    }
}

/// Oriented edge `from -> to` with `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Face whose loop traverses `from -> to`.
    pub left: usize,
    /// Face whose loop traverses `to -> from`.
    pub right: usize,
}

/// A convex polyhedron with triangular and parallelogram faces.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    vertices: Vec<Point3>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<(usize, usize), usize>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    classes: Vec<Vec<Option<SegmentClass>>>,
    volume: f64,
    vertex_centroid: Point3,
    diameter: f64,
}

impl Polyhedron {
    /// Validates planarity, face shapes, convexity, outward orientation and
    /// manifold edges, then derives all combinatorics.
    pub fn new(vertices: Vec<Point3>, loops: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        if nv < 4 {
            return Err(Error::Geometry(format!("polyhedron needs at least 4 vertices, got {nv}")));
        }
        if loops.len() < 4 {
            return Err(Error::Geometry(format!(
                "polyhedron needs at least 4 faces, got {}",
                loops.len()
            )));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Geometry("non-finite vertex coordinate".into()));
        }
        let mut diameter = 0.0f64;
        for i in 0..nv {
            for j in i + 1..nv {
                diameter = diameter.max((vertices[i] - vertices[j]).norm());
            }
        }
        if diameter == 0.0 {
            return Err(Error::Geometry("degenerate polyhedron".into()));
        }

        let mut faces = Vec::with_capacity(loops.len());
        for (fi, lp) in loops.iter().enumerate() {
            faces.push(Self::build_face(&vertices, fi, lp, diameter)?);
        }

        for (fi, f) in faces.iter().enumerate() {
            let c = f.centroid;
            for (v, x) in vertices.iter().enumerate() {
                if f.contains(v) {
                    continue;
                }
                if f.normal.dot(&(x - c)) >= -tolerances::FACE_PLANARITY * diameter {
                    return Err(Error::Geometry(format!(
                        "face {fi} is not a supporting plane with outward normal (vertex {v} is not strictly behind it)"
                    )));
                }
            }
        }
        if let Some(v) = (0..nv).find(|&v| !faces.iter().any(|f| f.contains(v))) {
            return Err(Error::Geometry(format!("vertex {v} belongs to no face")));
        }

        // Directed loop steps: each undirected edge must be traversed once each way.
        let mut steps: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            let n = f.len();
            for k in 0..n {
                let key = (f.vertices[k], f.vertices[(k + 1) % n]);
                if steps.insert(key, fi).is_some() {
                    return Err(Error::Geometry(format!(
                        "directed edge {} -> {} appears in two faces; face orientation is inconsistent",
                        key.0, key.1
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        let mut edge_index = BTreeMap::new();
        for (&(a, b), &fa) in &steps {
            if a > b {
                continue;
            }
            let Some(&fb) = steps.get(&(b, a)) else {
                return Err(Error::Geometry(format!("edge ({a}, {b}) belongs to only one face")));
            };
            edge_index.insert((a, b), edges.len());
            edges.push(Edge { from: a, to: b, left: fa, right: fb });
        }
        if let Some((&(a, b), _)) = steps.iter().find(|(&(a, b), _)| a > b && !steps.contains_key(&(b, a))) {
            return Err(Error::Geometry(format!("edge ({b}, {a}) belongs to only one face")));
        }

        for f in faces.iter_mut() {
            let n = f.vertices.len();
            for k in 0..n {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % n]);
                f.edges.push(edge_index[&(a.min(b), a.max(b))]);
                f.edge_signs.push(if a < b { 1 } else { -1 });
            }
        }

        let mut vertex_faces = vec![Vec::new(); nv];
        for v in 0..nv {
            vertex_faces[v] = Self::ordered_vertex_faces(&faces, v)?;
        }
        let mut vertex_edges = vec![Vec::new(); nv];
        for (id, e) in edges.iter().enumerate() {
            vertex_edges[e.from].push(id);
            vertex_edges[e.to].push(id);
        }

        let mut classes = vec![vec![None; nv]; nv];
        for i in 0..nv {
            for j in 0..nv {
                if i == j {
                    continue;
                }
                let class = if edge_index.contains_key(&(i.min(j), i.max(j))) {
                    SegmentClass::Edge
                } else if faces.iter().any(|f| f.contains(i) && f.contains(j)) {
                    SegmentClass::Surface
                } else {
                    SegmentClass::Interior
                };
                classes[i][j] = Some(class);
            }
        }

        let volume: f64 = faces.iter().map(|f| f.area * f.normal.dot(&f.centroid) / 3.0).sum();
        let vertex_centroid = vertices.iter().sum::<Point3>() / nv as f64;

        Ok(Self {
            vertices,
            faces,
            edges,
            edge_index,
            vertex_faces,
            vertex_edges,
            classes,
            volume,
            vertex_centroid,
            diameter,
        })
    }

    fn build_face(vertices: &[Point3], fi: usize, lp: &[usize], h: f64) -> Result<Face> {
        let n = lp.len();
        if n < 3 {
            return Err(Error::Geometry(format!("face {fi} has {n} vertices")));
        }
        if let Some(&bad) = lp.iter().find(|&&v| v >= vertices.len()) {
            return Err(Error::Geometry(format!("face {fi} references missing vertex {bad}")));
        }
        for a in 0..n {
            if lp[a + 1..].contains(&lp[a]) {
                return Err(Error::Geometry(format!("face {fi} repeats vertex {}", lp[a])));
            }
        }
        let pts: Vec<Point3> = lp.iter().map(|&v| vertices[v]).collect();
        // Newell's method: robust area vector for planar loops.
        let mut area_vec = Point3::zeros();
        for k in 0..n {
            area_vec += pts[k].cross(&pts[(k + 1) % n]);
        }
        area_vec *= 0.5;
        let area = area_vec.norm();
        if area <= tolerances::STRICT_CONVEXITY * h * h {
            return Err(Error::Geometry(format!("face {fi} has zero area")));
        }
        let normal = area_vec / area;
        let mean = pts.iter().sum::<Point3>() / n as f64;
        for (k, p) in pts.iter().enumerate() {
            let d = normal.dot(&(p - mean)).abs();
            if d > tolerances::FACE_PLANARITY * h {
                return Err(Error::Geometry(format!(
                    "face {fi} is not planar: vertex {} is {d:e} off the face plane",
                    lp[k]
                )));
            }
        }
        for k in 0..n {
            let e0 = pts[(k + 1) % n] - pts[k];
            let e1 = pts[(k + 2) % n] - pts[(k + 1) % n];
            if e0.cross(&e1).dot(&normal) <= tolerances::STRICT_CONVEXITY * h * h {
                return Err(Error::Geometry(format!(
                    "face {fi} is not strictly convex at vertex {}",
                    lp[(k + 1) % n]
                )));
            }
        }
        let shape = match n {
            3 => FaceShape::Triangle,
            4 => {
                let gap = (pts[0] - pts[1] + pts[2] - pts[3]).norm();
                if gap > tolerances::PARALLELOGRAM * h {
                    return Err(Error::Geometry(format!(
                        "face {fi} is a quadrilateral but not a parallelogram (defect {gap:e})"
                    )));
                }
                FaceShape::Parallelogram
            }
            _ => {
                return Err(Error::Geometry(format!(
                    "face {fi} has {n} vertices; only triangles and parallelograms are admitted"
                )))
            }
        };
        // Area centroid via a fan from the first vertex.
        let mut centroid = Point3::zeros();
        for k in 1..n - 1 {
            let w = (pts[k] - pts[0]).cross(&(pts[k + 1] - pts[0])).dot(&normal) * 0.5;
            centroid += (pts[0] + pts[k] + pts[k + 1]) * (w / 3.0);
        }
        centroid /= area;
        Ok(Face {
            vertices: lp.to_vec(),
            normal,
            area,
            centroid,
            shape,
            edges: Vec::new(),
            edge_signs: Vec::new(),
        })
    }

    /// Faces around `v` in cyclic order: the successor `g` of `f` is the face
    /// with `prev_g(v) == next_f(v)`.
    fn ordered_vertex_faces(faces: &[Face], v: usize) -> Result<Vec<usize>> {
        let incident: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].contains(v)).collect();
        if incident.len() < 3 {
            return Err(Error::Geometry(format!("vertex {v} has fewer than 3 incident faces")));
        }
        let mut order = vec![incident[0]];
        while order.len() < incident.len() {
            let cur = *order.last().unwrap();
            let (_, next) = faces[cur].neighbours(v).unwrap();
            let succ = incident
                .iter()
                .copied()
                .find(|&g| faces[g].neighbours(v).unwrap().0 == next)
                .ok_or_else(|| Error::Geometry(format!("faces around vertex {v} do not close")))?;
            if order.contains(&succ) {
                return Err(Error::Geometry(format!("vertex {v} is not a manifold vertex")));
            }
            order.push(succ);
        }
        Ok(order)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point3 {
        self.vertices[i]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    /// The edge set E⁺, directed from lower to higher vertex index.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Id of the undirected edge `{a, b}` and `+1` if `a -> b` matches its direction.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<(usize, i32)> {
        let id = *self.edge_index.get(&(a.min(b), a.max(b)))?;
        Some((id, if a < b { 1 } else { -1 }))
    }

    pub fn edge_vector(&self, e: usize) -> Point3 {
        self.vertices[self.edges[e].to] - self.vertices[self.edges[e].from]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_vector(e).norm()
    }

    /// Incident faces of `v` in cyclic order.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Edge ids incident to `v`.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Vertices joined to `v` by an edge.
    pub fn vertex_neighbours(&self, v: usize) -> Vec<usize> {
        self.vertex_edges[v]
            .iter()
            .map(|&e| if self.edges[e].from == v { self.edges[e].to } else { self.edges[e].from })
            .collect()
    }

    pub fn classify(&self, i: usize, j: usize) -> Option<SegmentClass> {
        self.classes.get(i)?.get(j).copied().flatten()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn vertex_centroid(&self) -> Point3 {
        self.vertex_centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Distance from `x` to the plane of face `f`, positive inside.
    pub fn face_distance(&self, f: usize, x: &Point3) -> f64 {
        let face = &self.faces[f];
        face.normal.dot(&(face.centroid - x))
    }

    /// Smallest face-plane distance; positive iff `x` is interior.
    pub fn boundary_distance(&self, x: &Point3) -> f64 {
        (0..self.faces.len()).map(|f| self.face_distance(f, x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains_interior(&self, x: &Point3) -> bool {
        self.boundary_distance(x) > tolerances::INTERIOR_MARGIN * self.diameter
    }

    /// Volume of the pyramid over face `f` with apex `x`.
    pub fn sub_pyramid_volume(&self, f: usize, x: &Point3) -> f64 {
        self.face_distance(f, x) * self.faces[f].area / 3.0
    }

    /// Euler's formula `#E = #V + #F - 2`.
    pub fn check_euler(&self) -> bool {
        self.num_edges() + 2 == self.num_vertices() + self.num_faces()
    }

    /// Full classification table over ordered pairs; `None` on the diagonal.
    pub fn classify_segments(&self) -> &[Vec<Option<SegmentClass>>] {
        &self.classes
    }

    /// Vertices of the two faces sharing edge `e`.
    pub fn edge_face_vertices(&self, e: usize) -> Vec<usize> {
        let edge = &self.edges[e];
        let mut out: Vec<usize> = self.faces[edge.left].vertices.clone();
        for &v in &self.faces[edge.right].vertices {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn translated(&self, shift: Point3) -> Result<Self> {
        Self::new(
            self.vertices.iter().map(|v| v + shift).collect(),
            self.faces.iter().map(|f| f.vertices.clone()).collect(),
        )
    }
}
