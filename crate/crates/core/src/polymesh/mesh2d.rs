use std::collections::HashMap;

use crate::error::{Error, Result};

use super::polygon::{Point2, Polygon2D};

/// Global mesh edge. The global normal is the clockwise rotation of `to - from`,
/// where `from < to` in the global vertex numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeshEdge {
    pub from: usize,
    pub to: usize,
    /// Incident cells; `cells[1]` is `None` on the boundary.
    pub cells: [Option<usize>; 2],
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

/// Conforming mesh of convex polygons stored as flat index arrays.
#[derive(Clone, Debug)]
pub struct Mesh2D {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    polygons: Vec<Polygon2D>,
    edges: Vec<MeshEdge>,
    cell_edges: Vec<Vec<usize>>,
    cell_edge_signs: Vec<Vec<f64>>,
}

impl Mesh2D {
    /// Builds the edge table and orientation signs from counterclockwise cell loops.
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut polygons = Vec::with_capacity(cells.len());
        for (c, loop_) in cells.iter().enumerate() {
            if let Some(&bad) = loop_.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Geometry(format!(
                    "cell {c} references vertex {bad} but only {} vertices exist",
                    vertices.len()
                )));
            }
            let poly = Polygon2D::new(loop_.iter().map(|&v| vertices[v]).collect())
                .map_err(|e| Error::Geometry(format!("cell {c}: {e}")))?;
            polygons.push(poly);
        }

        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut cell_edges: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        let mut cell_edge_signs: Vec<Vec<f64>> = Vec::with_capacity(cells.len());
        for (c, loop_) in cells.iter().enumerate() {
            let n = loop_.len();
            let mut ids = Vec::with_capacity(n);
            let mut signs = Vec::with_capacity(n);
            for i in 0..n {
                let a = loop_[i];
                let b = loop_[(i + 1) % n];
                let key = (a.min(b), a.max(b));
                let sign = if a < b { 1.0 } else { -1.0 };
                let id = match index.get(&key) {
                    Some(&id) => {
                        let e = &mut edges[id];
                        if e.cells[1].is_some() {
                            return Err(Error::Geometry(format!(
                                "edge ({}, {}) is shared by more than two cells",
                                key.0, key.1
                            )));
                        }
                        let other = e.cells[0].unwrap();
                        let other_sign = if other == c {
                            signs[ids.iter().position(|&x| x == id).unwrap()]
                        } else {
                            let k = cell_edges[other].iter().position(|&x: &usize| x == id).unwrap();
                            cell_edge_signs[other][k]
                        };
                        if other_sign == sign {
                            return Err(Error::Geometry(format!(
                                "cells {other} and {c} traverse edge ({}, {}) in the same direction",
                                key.0, key.1
                            )));
                        }
                        e.cells[1] = Some(c);
                        id
                    }
                    None => {
                        let id = edges.len();
                        edges.push(MeshEdge { from: key.0, to: key.1, cells: [Some(c), None] });
                        index.insert(key, id);
                        id
                    }
                };
                ids.push(id);
                signs.push(sign);
            }
            cell_edges.push(ids);
            cell_edge_signs.push(signs);
        }

        Ok(Self { vertices, cells, polygons, edges, cell_edges, cell_edge_signs })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn polygon(&self, cell: usize) -> &Polygon2D {
        &self.polygons[cell]
    }

    pub fn polygons(&self) -> &[Polygon2D] {
        &self.polygons
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    /// Global edge ids of the cell's local edges.
    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    /// `+1` where the local outward normal equals the global edge normal, `-1` otherwise.
    pub fn cell_edge_signs(&self, cell: usize) -> &[f64] {
        &self.cell_edge_signs[cell]
    }

    /// Unit global normal of an edge.
    pub fn edge_normal(&self, edge: usize) -> Point2 {
        let e = &self.edges[edge];
        let t = (self.vertices[e.to] - self.vertices[e.from]).normalize();
        Point2::new(t.y, -t.x)
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let e = &self.edges[edge];
        (self.vertices[e.to] - self.vertices[e.from]).norm()
    }

    pub fn total_area(&self) -> f64 {
        self.polygons.iter().map(Polygon2D::area).sum()
    }

    /// Largest cell diameter.
    pub fn max_diameter(&self) -> f64 {
        self.polygons.iter().map(Polygon2D::diameter).fold(0.0, f64::max)
    }

    /// Checks that the mesh tiles the unit square: areas sum to one and every
    /// boundary edge lies on the square's boundary.
    pub fn check_unit_square(&self, tol: f64) -> Result<()> {
        let area = self.total_area();
        if (area - 1.0).abs() > tol {
            return Err(Error::Geometry(format!("cell areas sum to {area}, expected 1")));
        }
        let on_side = |p: &Point2, q: &Point2| {
            (p.x.abs() < tol && q.x.abs() < tol)
                || ((p.x - 1.0).abs() < tol && (q.x - 1.0).abs() < tol)
                || (p.y.abs() < tol && q.y.abs() < tol)
                || ((p.y - 1.0).abs() < tol && (q.y - 1.0).abs() < tol)
        };
        for (id, e) in self.edges.iter().enumerate() {
            if e.is_boundary() && !on_side(&self.vertices[e.from], &self.vertices[e.to]) {
                return Err(Error::Geometry(format!(
                    "boundary edge {id} does not lie on the unit square boundary"
                )));
            }
        }
        Ok(())
    }

    /// Shape-regularity indicators: min |T| / h_T^2 and min |e| / h_T over all cells.
    pub fn shape_stats(&self) -> ShapeStats {
        let mut min_area_ratio = f64::INFINITY;
        let mut min_edge_ratio = f64::INFINITY;
        for p in &self.polygons {
            let h = p.diameter();
            min_area_ratio = min_area_ratio.min(p.area() / (h * h));
            for i in 0..p.len() {
                min_edge_ratio = min_edge_ratio.min(p.edge_length(i) / h);
            }
        }
        ShapeStats { min_area_ratio, min_edge_ratio }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeStats {
    pub min_area_ratio: f64,
    pub min_edge_ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_squares() -> Mesh2D {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 1.0),
            Point2::new(1.0, 1.0),
        ];
        Mesh2D::new(v, vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]]).unwrap()
    }

    #[test]
    fn interior_edge_has_opposite_signs() {
        let m = two_squares();
        assert_eq!(m.num_edges(), 7);
        let interior: Vec<usize> =
            (0..m.num_edges()).filter(|&e| !m.edges()[e].is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        let e = interior[0];
        let s0 = m.cell_edges(0).iter().position(|&x| x == e).map(|k| m.cell_edge_signs(0)[k]);
        let s1 = m.cell_edges(1).iter().position(|&x| x == e).map(|k| m.cell_edge_signs(1)[k]);
        assert_eq!(s0.unwrap() * s1.unwrap(), -1.0);
        m.check_unit_square(1e-13).unwrap();
    }

    #[test]
    fn sign_matches_local_normal() {
        let m = two_squares();
        for c in 0..m.num_cells() {
            let p = m.polygon(c);
            for (k, &e) in m.cell_edges(c).iter().enumerate() {
                let local = p.outward_normal(k);
                let global = m.edge_normal(e);
                assert!((local - global * m.cell_edge_signs(c)[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_index_and_overlap() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(Mesh2D::new(v.clone(), vec![vec![0, 1, 7]]).is_err());
        assert!(Mesh2D::new(v, vec![vec![0, 1, 2], vec![0, 1, 2]]).is_err());
    }
}
