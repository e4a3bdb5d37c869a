//! Wachspress coordinates on convex polygons and Warren's rational form on
//! convex polyhedra, with analytic gradients.

use nalgebra::{Matrix3, SVector, Vector3};

use crate::error::{Error, Result};
use crate::polymesh::{cross2, FaceShape, Point2, Point3, Polygon2D, Polyhedron};

/// Coordinates `λ_i(x)` and gradients `∇λ_i(x)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricEval<const D: usize> {
    pub point: SVector<f64, D>,
    pub values: Vec<f64>,
    pub gradients: Vec<SVector<f64, D>>,
}

pub type Eval2 = BarycentricEval<2>;
pub type Eval3 = BarycentricEval<3>;

impl<const D: usize> BarycentricEval<D> {
    /// `|Σ λ_i - 1|`.
    pub fn partition_residual(&self) -> f64 {
        (self.values.iter().sum::<f64>() - 1.0).abs()
    }

    /// `|Σ λ_i v_i - x|`.
    pub fn precision_residual(&self, vertices: &[SVector<f64, D>]) -> f64 {
        let s: SVector<f64, D> = self.values.iter().zip(vertices).map(|(l, v)| v * *l).sum();
        (s - self.point).norm()
    }

    /// `|Σ ∇λ_i|`.
    pub fn gradient_sum(&self) -> f64 {
        self.gradients.iter().sum::<SVector<f64, D>>().norm()
    }
}

/// Wachspress coordinates on a convex polygon at an interior point.
pub fn eval2d(poly: &Polygon2D, x: &Point2) -> Result<Eval2> {
    if !poly.contains_interior(x) {
        return Err(Error::Domain(format!("({}, {}) is not inside the polygon", x.x, x.y)));
    }
    let n = poly.len();
    let normals: Vec<Point2> = (0..n).map(|i| poly.outward_normal(i)).collect();
    let h: Vec<f64> = (0..n).map(|i| poly.edge_distance(i, x)).collect();
    let mut w = vec![0.0; n];
    let mut dw = vec![Point2::zeros(); n];
    for i in 0..n {
        let p = (i + n - 1) % n;
        w[i] = cross2(&normals[p], &normals[i]) / (h[p] * h[i]);
        dw[i] = (normals[p] / h[p] + normals[i] / h[i]) * w[i];
    }
    Ok(normalize(*x, w, dw))
}

fn normalize<const D: usize>(
    point: SVector<f64, D>,
    w: Vec<f64>,
    dw: Vec<SVector<f64, D>>,
) -> BarycentricEval<D> {
    let total: f64 = w.iter().sum();
    let dtotal: SVector<f64, D> = dw.iter().sum();
    let values: Vec<f64> = w.iter().map(|wi| wi / total).collect();
    let gradients = dw.iter().zip(&values).map(|(d, l)| (d - dtotal * *l) / total).collect();
    BarycentricEval { point, values, gradients }
}

/// Boundary values of all coordinates at `v_i + s (v_{i+1} - v_i)`.
pub fn trace2d(poly: &Polygon2D, edge: usize, s: f64) -> Result<Vec<f64>> {
    let n = poly.len();
    if edge >= n {
        return Err(Error::InvalidIndex(format!("edge {edge} of a {n}-gon")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("edge parameter {s} outside [0, 1]")));
    }
    let mut out = vec![0.0; n];
    out[edge] += 1.0 - s;
    out[(edge + 1) % n] += s;
    Ok(out)
}

/// Warren's rational coordinates on a convex polyhedron.
///
/// Per vertex the incident faces are stored in cyclic order; the weight is a
/// fan of `det[n_1, n_j, n_{j+1}] / (h_1 h_j h_{j+1})` terms times a sign that
/// makes it positive.
#[derive(Clone, Debug)]
pub struct Wachspress3D<'a> {
    poly: &'a Polyhedron,
    signs: Vec<f64>,
    /// Per vertex, per fan triangle: `(f_1, f_j, f_{j+1}, det)`.
    fans: Vec<Vec<(usize, usize, usize, f64)>>,
}

impl<'a> Wachspress3D<'a> {
    pub fn new(poly: &'a Polyhedron) -> Self {
        let mut signs = Vec::with_capacity(poly.num_vertices());
        let mut fans = Vec::with_capacity(poly.num_vertices());
        for v in 0..poly.num_vertices() {
            let fs = poly.vertex_faces(v);
            let n = |f: usize| poly.face(f).normal;
            let fan: Vec<_> = (1..fs.len() - 1)
                .map(|j| {
                    let d = Matrix3::from_columns(&[n(fs[0]), n(fs[j]), n(fs[j + 1])]).determinant();
                    (fs[0], fs[j], fs[j + 1], d)
                })
                .collect();
            let total: f64 = fan.iter().map(|t| t.3).sum();
            signs.push(total.signum());
            fans.push(fan);
        }
        Self { poly, signs, fans }
    }

    pub fn polyhedron(&self) -> &'a Polyhedron {
        self.poly
    }

    pub fn eval(&self, x: &Point3) -> Result<Eval3> {
        if !self.poly.contains_interior(x) {
            return Err(Error::Domain(format!("({}, {}, {}) is not inside the polyhedron", x.x, x.y, x.z)));
        }
        let nf = self.poly.num_faces();
        let h: Vec<f64> = (0..nf).map(|f| self.poly.face_distance(f, x)).collect();
        let p: Vec<Vector3<f64>> = (0..nf).map(|f| self.poly.face(f).normal / h[f]).collect();
        let nv = self.poly.num_vertices();
        let mut w = vec![0.0; nv];
        let mut dw = vec![Vector3::zeros(); nv];
        for v in 0..nv {
            for &(a, b, c, det) in &self.fans[v] {
                let t = self.signs[v] * det / (h[a] * h[b] * h[c]);
                w[v] += t;
                dw[v] += (p[a] + p[b] + p[c]) * t;
            }
        }
        Ok(normalize(*x, w, dw))
    }
}

pub fn eval3d(poly: &Polyhedron, x: &Point3) -> Result<Eval3> {
    Wachspress3D::new(poly).eval(x)
}

/// Orthonormal in-plane frame of a polyhedron face: `x = origin + u e1 + v e2`.
#[derive(Clone, Debug)]
pub struct FaceFrame {
    pub origin: Point3,
    pub e1: Point3,
    pub e2: Point3,
    /// The face as a counterclockwise polygon in frame coordinates.
    pub polygon: Polygon2D,
}

impl FaceFrame {
    pub fn new(poly: &Polyhedron, f: usize) -> Result<Self> {
        let face = poly.face(f);
        let origin = poly.vertex(face.vertices[0]);
        let e1 = (poly.vertex(face.vertices[1]) - origin).normalize();
        let e2 = face.normal.cross(&e1);
        let pts = face
            .vertices
            .iter()
            .map(|&v| {
                let d = poly.vertex(v) - origin;
                Point2::new(d.dot(&e1), d.dot(&e2))
            })
            .collect();
        Ok(Self { origin, e1, e2, polygon: Polygon2D::new(pts)? })
    }

    pub fn lift(&self, u: &Point2) -> Point3 {
        self.origin + self.e1 * u.x + self.e2 * u.y
    }
}

/// Residuals of the face cross-product identities at the given points:
/// on a triangle `det[∇λ_i ∇λ_{i+1}] - 1/(2|f|)` for the three cyclic pairs,
/// on a parallelogram `det[∇λ_1 ∇λ_2] + det[∇λ_3 ∇λ_4] - 1/|f|` and
/// `det[∇λ_2 ∇λ_3] + det[∇λ_4 ∇λ_1] - 1/|f|`.
pub fn check_face_cross_products(face: &Polygon2D, points: &[Point2]) -> Result<Vec<f64>> {
    let area = face.area();
    let is_parallelogram = face.len() == 4
        && (face.vertex(0) - face.vertex(1) + face.vertex(2) - face.vertex(3)).norm()
            <= crate::tolerances::PARALLELOGRAM * face.diameter();
    if face.len() != 3 && !is_parallelogram {
        return Err(Error::UnsupportedShape(format!(
            "cross-product identities need a triangle or parallelogram, got a {}-gon",
            face.len()
        )));
    }
    let mut out = Vec::new();
    for x in points {
        let g = eval2d(face, x)?.gradients;
        let det = |i: usize, j: usize| cross2(&g[i], &g[j]);
        if face.len() == 3 {
            for i in 0..3 {
                out.push(det(i, (i + 1) % 3) - 1.0 / (2.0 * area));
            }
        } else {
            out.push(det(0, 1) + det(2, 3) - 1.0 / area);
            out.push(det(1, 2) + det(3, 0) - 1.0 / area);
        }
    }
    Ok(out)
}

/// Face-shape dispatch used by the 3D checks.
pub fn face_shape_residuals(poly: &Polyhedron, f: usize, points: &[Point2]) -> Result<Vec<f64>> {
    let frame = FaceFrame::new(poly, f)?;
    match poly.face(f).shape {
        FaceShape::Triangle | FaceShape::Parallelogram => check_face_cross_products(&frame.polygon, points),
    }
}
