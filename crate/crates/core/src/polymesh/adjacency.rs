use nalgebra::DMatrix;

use crate::linalg;
use crate::tolerances;

use super::polyhedron::Polyhedron;

/// Signed incidence matrices of a polyhedron and their Gram products.
///
/// Rows of `a_f_to_e` and `a_v_to_e` are indexed by the edges of E⁺ in the
/// polyhedron's order.
#[derive(Clone, Debug)]
pub struct AdjacencyMatrices {
    /// `+1` if the edge lies on the oriented face boundary, `-1` if reversed.
    pub a_f_to_e: DMatrix<i64>,
    /// `-1` at the start vertex, `+1` at the end vertex.
    pub a_v_to_e: DMatrix<i64>,
    pub m_f: DMatrix<i64>,
    pub m_v: DMatrix<i64>,
}

/// Kernel and rank facts about the adjacency matrices.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AdjacencyReport {
    pub rank_m_f: usize,
    pub rank_m_v: usize,
    pub num_faces: usize,
    pub num_vertices: usize,
    pub ones_in_kernel_m_f: bool,
    pub ones_in_kernel_m_v: bool,
    pub complex_property: bool,
    pub diagonals_match_degrees: bool,
}

impl AdjacencyReport {
    pub fn passed(&self) -> bool {
        self.rank_m_f + 1 == self.num_faces
            && self.rank_m_v + 1 == self.num_vertices
            && self.ones_in_kernel_m_f
            && self.ones_in_kernel_m_v
            && self.complex_property
            && self.diagonals_match_degrees
    }
}

pub fn build_adjacency(poly: &Polyhedron) -> AdjacencyMatrices {
    let ne = poly.num_edges();
    let mut a_f_to_e = DMatrix::<i64>::zeros(ne, poly.num_faces());
    for (f, face) in poly.faces().iter().enumerate() {
        for (&e, &s) in face.edges.iter().zip(&face.edge_signs) {
            a_f_to_e[(e, f)] = s as i64;
        }
    }
    let mut a_v_to_e = DMatrix::<i64>::zeros(ne, poly.num_vertices());
    for (e, edge) in poly.edges().iter().enumerate() {
        a_v_to_e[(e, edge.from)] = -1;
        a_v_to_e[(e, edge.to)] = 1;
    }
    let m_f = a_f_to_e.transpose() * &a_f_to_e;
    let m_v = a_v_to_e.transpose() * &a_v_to_e;
    AdjacencyMatrices { a_f_to_e, a_v_to_e, m_f, m_v }
}

impl AdjacencyMatrices {
    pub fn to_f64(m: &DMatrix<i64>) -> DMatrix<f64> {
        m.map(|x| x as f64)
    }

    /// `(A^{FtoE})^T A^{VtoE}` in exact integer arithmetic.
    pub fn complex_product(&self) -> DMatrix<i64> {
        self.a_f_to_e.transpose() * &self.a_v_to_e
    }

    pub fn report(&self, poly: &Polyhedron) -> AdjacencyReport {
        let ones_kernel = |m: &DMatrix<i64>| m.row_iter().all(|r| r.iter().sum::<i64>() == 0);
        let face_degrees = (0..poly.num_faces()).all(|f| self.m_f[(f, f)] == poly.face(f).len() as i64);
        let vertex_degrees =
            (0..poly.num_vertices()).all(|v| self.m_v[(v, v)] == poly.vertex_edges(v).len() as i64);
        AdjacencyReport {
            rank_m_f: linalg::numerical_rank(&Self::to_f64(&self.m_f), tolerances::RANK),
            rank_m_v: linalg::numerical_rank(&Self::to_f64(&self.m_v), tolerances::RANK),
            num_faces: poly.num_faces(),
            num_vertices: poly.num_vertices(),
            ones_in_kernel_m_f: ones_kernel(&self.m_f),
            ones_in_kernel_m_v: ones_kernel(&self.m_v),
            complex_property: self.complex_product().iter().all(|&x| x == 0),
            diagonals_match_degrees: face_degrees && vertex_degrees,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymesh::shapes;

    #[test]
    fn tetrahedron_face_gram() {
        let t = shapes::tetrahedron();
        let a = build_adjacency(&t);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.m_f[(i, j)], if i == j { 3 } else { -1 });
            }
        }
    }

    #[test]
    fn octahedron_ranks() {
        let o = shapes::octahedron();
        let r = build_adjacency(&o).report(&o);
        assert_eq!((r.rank_m_f, r.rank_m_v), (7, 5));
        assert!(r.passed());
    }

    #[test]
    fn corpus_reports_pass() {
        for (name, p) in shapes::corpus() {
            let r = build_adjacency(&p).report(&p);
            assert!(r.passed(), "{name}: {r:?}");
        }
    }
}
