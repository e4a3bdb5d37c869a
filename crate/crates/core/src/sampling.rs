//! Deterministic sample points: inward-offset trace points on edges and faces,
//! and interior grids for least-squares space checks.

use crate::polymesh::{Point2, Point3, Polygon2D, Polyhedron};
use crate::tolerances;

/// Edge parameters used for trace sampling; they avoid the endpoints.
pub fn edge_params(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.1 + 0.8 * (k as f64 + 0.5) / count as f64).collect()
}

/// Points on polygon edge `i`, moved inward by the trace offset.
pub fn polygon_edge_samples(poly: &Polygon2D, i: usize, count: usize) -> Vec<Point2> {
    polygon_edge_samples_scaled(poly, i, count, 1.0)
}

/// As [`polygon_edge_samples`] with the offset multiplied by `factor`.
pub fn polygon_edge_samples_scaled(poly: &Polygon2D, i: usize, count: usize, factor: f64) -> Vec<Point2> {
    let eps = factor * tolerances::TRACE_OFFSET * poly.diameter();
    edge_params(count).into_iter().map(|s| poly.offset_edge_point(i, s, eps)).collect()
}

/// Points spread over face `f` (not offset).
pub fn face_points(poly: &Polyhedron, f: usize, count: usize) -> Vec<Point3> {
    let face = poly.face(f);
    let c = face.centroid;
    let m = face.len();
    let golden = 0.618_033_988_749_894_9;
    let plastic = 0.754_877_666_246_692_7;
    (0..count)
        .map(|k| {
            let a = poly.vertex(face.vertices[k % m]) - c;
            let b = poly.vertex(face.vertices[(k + 1) % m]) - c;
            let mut s = (0.3 + golden * k as f64).fract();
            let mut t = (0.6 + plastic * k as f64).fract();
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            c + (a * s + b * t) * 0.9
        })
        .collect()
}

/// Face points moved inward along `-n_f` by the trace offset.
pub fn face_samples(poly: &Polyhedron, f: usize, count: usize) -> Vec<Point3> {
    face_samples_scaled(poly, f, count, 1.0)
}

/// As [`face_samples`] with the offset multiplied by `factor`.
pub fn face_samples_scaled(poly: &Polyhedron, f: usize, count: usize, factor: f64) -> Vec<Point3> {
    let eps = factor * tolerances::TRACE_OFFSET * poly.diameter();
    let n = poly.face(f).normal;
    face_points(poly, f, count).into_iter().map(|x| x - n * eps).collect()
}

/// Inward direction at edge `e`: the normalized `-(n_l + n_r)`.
pub fn edge_inward_direction(poly: &Polyhedron, e: usize) -> Point3 {
    let edge = &poly.edges()[e];
    -(poly.face(edge.left).normal + poly.face(edge.right).normal).normalize()
}

/// Points on edge `e` moved inward by the trace offset.
pub fn edge_samples(poly: &Polyhedron, e: usize, count: usize) -> Vec<Point3> {
    edge_samples_scaled(poly, e, count, 1.0)
}

/// As [`edge_samples`] with the offset multiplied by `factor`.
pub fn edge_samples_scaled(poly: &Polyhedron, e: usize, count: usize, factor: f64) -> Vec<Point3> {
    let eps = factor * tolerances::TRACE_OFFSET * poly.diameter();
    let edge = &poly.edges()[e];
    let a = poly.vertex(edge.from);
    let d = poly.edge_vector(e);
    let inward = edge_inward_direction(poly, e);
    edge_params(count).into_iter().map(|s| a + d * s + inward * eps).collect()
}

fn grid_axis(lo: f64, hi: f64, m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / m as f64)
}

/// Tensor grid over the bounding box kept where the distance to the boundary
/// exceeds `margin * h`; refined until at least `min_points` survive.
pub fn interior_grid_3d(poly: &Polyhedron, min_points: usize, margin: f64) -> Vec<Point3> {
    let lo = poly.vertices().iter().fold(Point3::repeat(f64::INFINITY), |a, v| a.inf(v));
    let hi = poly.vertices().iter().fold(Point3::repeat(f64::NEG_INFINITY), |a, v| a.sup(v));
    let h = poly.diameter();
    let mut m = 4;
    loop {
        let mut pts = Vec::new();
        for x in grid_axis(lo.x, hi.x, m) {
            for y in grid_axis(lo.y, hi.y, m) {
                for z in grid_axis(lo.z, hi.z, m) {
                    let p = Point3::new(x, y, z);
                    if poly.boundary_distance(&p) > margin * h {
                        pts.push(p);
                    }
                }
            }
        }
        if pts.len() >= min_points || m > 64 {
            return pts;
        }
        m += 2;
    }
}

pub fn interior_grid_2d(poly: &Polygon2D, min_points: usize, margin: f64) -> Vec<Point2> {
    let lo = poly.vertices().iter().fold(Point2::repeat(f64::INFINITY), |a, v| a.inf(v));
    let hi = poly.vertices().iter().fold(Point2::repeat(f64::NEG_INFINITY), |a, v| a.sup(v));
    let h = poly.diameter();
    let mut m = 4;
    loop {
        let mut pts = Vec::new();
        for x in grid_axis(lo.x, hi.x, m) {
            for y in grid_axis(lo.y, hi.y, m) {
                let p = Point2::new(x, y);
                if poly.boundary_distance(&p) > margin * h {
                    pts.push(p);
                }
            }
        }
        if pts.len() >= min_points || m > 256 {
            return pts;
        }
        m += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymesh::shapes;

    #[test]
    fn samples_are_interior_and_close_to_boundary() {
        for (_, p) in shapes::corpus() {
            let h = p.diameter();
            for f in 0..p.num_faces() {
                for x in face_samples(&p, f, 20) {
                    assert!(p.contains_interior(&x));
                    assert!(p.face_distance(f, &x) < 2e-7 * h);
                }
            }
            for e in 0..p.num_edges() {
                for x in edge_samples(&p, e, 5) {
                    assert!(p.contains_interior(&x));
                }
            }
            assert!(interior_grid_3d(&p, 200, 0.02).len() >= 200);
        }
    }
}
