//! Gauss rules on segments, triangles and convex polygons.

use crate::error::{Error, Result};
use crate::polymesh::{Point2, Polygon2D};

pub const DEFAULT_DEGREE: usize = 10;
pub const MAX_DEGREE: usize = 20;
pub const MAX_EDGE_POINTS: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// Gauss rule on `[0, 1]`: `(parameters, weights)` with weights summing to one.
pub fn unit_interval_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// Nodes and weights on a segment; weights sum to its length.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub params: Vec<f64>,
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl EdgeRule {
    pub fn integrate(&self, mut f: impl FnMut(&Point2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// `npoints`-point Gauss rule on the segment `a -> b`, exact for degree `2 npoints - 1`.
pub fn edge_rule(a: &Point2, b: &Point2, npoints: usize) -> Result<EdgeRule> {
    if !(1..=MAX_EDGE_POINTS).contains(&npoints) {
        return Err(Error::InvalidArgument(format!(
            "edge rule needs 1..={MAX_EDGE_POINTS} points, got {npoints}"
        )));
    }
    let (s, w) = unit_interval_rule(npoints);
    let len = (b - a).norm();
    Ok(EdgeRule {
        points: s.iter().map(|t| a + (b - a) * *t).collect(),
        weights: w.iter().map(|v| v * len).collect(),
        params: s,
    })
}

/// Collapsed tensor Gauss rule on the reference triangle `(0,0), (1,0), (0,1)`,
/// exact for total degree `degree`. Weights sum to `1/2`.
pub fn reference_triangle_rule(degree: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    // The collapse adds one degree in the first direction.
    let n = (degree + 2).div_ceil(2);
    let (s, w) = unit_interval_rule(n);
    let mut pts = Vec::with_capacity(n * n);
    let mut wts = Vec::with_capacity(n * n);
    for (u, wu) in s.iter().zip(&w) {
        for (v, wv) in s.iter().zip(&w) {
            pts.push([*u, v * (1.0 - u)]);
            wts.push(wu * wv * (1.0 - u));
        }
    }
    (pts, wts)
}

/// Quadrature on a convex polygon by fan triangulation from the centroid.
#[derive(Clone, Debug)]
pub struct PolygonRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl PolygonRule {
    pub fn integrate(&self, mut f: impl FnMut(&Point2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn polygon_rule(poly: &Polygon2D, degree: usize) -> Result<PolygonRule> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::InvalidArgument(format!(
            "polygon rule degree must be in 1..={MAX_DEGREE}, got {degree}"
        )));
    }
    let (ref_pts, ref_w) = reference_triangle_rule(degree);
    let c = poly.centroid();
    let n = poly.len();
    let mut points = Vec::with_capacity(n * ref_pts.len());
    let mut weights = Vec::with_capacity(n * ref_pts.len());
    for i in 0..n {
        let a = poly.vertex(i) - c;
        let b = poly.vertex(i + 1) - c;
        let jac = 2.0 * poly.sub_triangle_area(i, &c);
        for (r, w) in ref_pts.iter().zip(&ref_w) {
            points.push(c + a * r[0] + b * r[1]);
            weights.push(w * jac);
        }
    }
    Ok(PolygonRule { points, weights, degree })
}
