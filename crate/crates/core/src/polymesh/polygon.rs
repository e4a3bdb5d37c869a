use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::tolerances;

pub type Point2 = Vector2<f64>;

/// 2D cross product `a x b`.
#[inline]
pub fn cross2(a: &Point2, b: &Point2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// A strictly convex polygon with counterclockwise vertices.
///
/// Edge `i` runs from vertex `i` to vertex `i + 1 (mod n)`.
#[derive(Clone, Debug)]
pub struct Polygon2D {
    vertices: Vec<Point2>,
    area: f64,
    centroid: Point2,
    diameter: f64,
}

impl Polygon2D {
    /// Validates orientation and strict convexity.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Geometry(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::Geometry("non-finite vertex coordinate".into()));
        }
        let mut diameter = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                diameter = diameter.max((vertices[i] - vertices[j]).norm());
            }
        }
        if diameter == 0.0 {
            return Err(Error::Geometry("degenerate polygon".into()));
        }

        let mut twice_area = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = cross2(&a, &b);
            twice_area += c;
            cx += (a.x + b.x) * c;
            cy += (a.y + b.y) * c;
        }
        if twice_area <= 0.0 {
            return Err(Error::Geometry(
                "polygon vertices are not in counterclockwise order".into(),
            ));
        }
        let area = 0.5 * twice_area;
        let centroid = Point2::new(cx / (3.0 * twice_area), cy / (3.0 * twice_area));

        let tol = tolerances::STRICT_CONVEXITY * diameter * diameter;
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if e0.norm() == 0.0 {
                return Err(Error::Geometry(format!("edge {i} has zero length")));
            }
            if cross2(&e0, &e1) <= tol {
                return Err(Error::Geometry(format!(
                    "polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        // A strictly left-turning closed loop with positive area can still wind twice.
        let mut turning = 0.0;
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            turning += cross2(&e0, &e1).atan2(e0.dot(&e1));
        }
        if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return Err(Error::Geometry("polygon boundary is self-intersecting".into()));
        }

        Ok(Self { vertices, area, centroid, diameter })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Vertex with cyclic indexing.
    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn edge_vector(&self, i: usize) -> Point2 {
        self.vertex(i + 1) - self.vertex(i)
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.edge_vector(i).norm()
    }

    /// Unit tangent in the counterclockwise direction.
    pub fn tangent(&self, i: usize) -> Point2 {
        self.edge_vector(i).normalize()
    }

    /// Unit outward normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> Point2 {
        let t = self.tangent(i);
        Point2::new(t.y, -t.x)
    }

    /// Distance from `x` to the line through edge `i`, positive on the inner side.
    pub fn edge_distance(&self, i: usize, x: &Point2) -> f64 {
        (self.vertex(i) - x).dot(&self.outward_normal(i))
    }

    /// Smallest signed distance to the edge lines; positive iff `x` is interior.
    pub fn boundary_distance(&self, x: &Point2) -> f64 {
        (0..self.len())
            .map(|i| self.edge_distance(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_interior(&self, x: &Point2) -> bool {
        self.boundary_distance(x) > tolerances::INTERIOR_MARGIN * self.diameter
    }

    /// Area of the triangle with base edge `i` and apex `apex`.
    pub fn sub_triangle_area(&self, i: usize, apex: &Point2) -> f64 {
        0.5 * self.edge_length(i) * self.edge_distance(i, apex)
    }

    /// Point on edge `i` at parameter `s` in `[0, 1]`.
    pub fn edge_point(&self, i: usize, s: f64) -> Point2 {
        self.vertex(i) + self.edge_vector(i) * s
    }

    /// Point on edge `i` moved inward by `offset` (absolute length) along the inward normal.
    pub fn offset_edge_point(&self, i: usize, s: f64, offset: f64) -> Point2 {
        self.edge_point(i, s) - self.outward_normal(i) * offset
    }

    /// Image under `x -> a * x + b`.
    pub fn transformed(&self, scale: f64, shift: Point2) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v * scale + shift).collect())
    }
}
