//! The lowest-order H(div) element on a convex polygon: one basis function per
//! edge with `q_i · n_j ≡ δ_ij` on edge `j`, and its interpolation operators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbc::{eval2d, Eval2};
use crate::polymesh::{Point2, Polygon2D};
use crate::quadrature::{edge_rule, polygon_rule};

/// Points per edge for flux functionals.
pub const EDGE_FLUX_POINTS: usize = 10;

/// The quarter turn `χ v = (-v_y, v_x)`; `curl φ = χ ∇φ`.
#[inline]
pub fn chi(v: &Point2) -> Point2 {
    Point2::new(-v.y, v.x)
}

/// `q_i = c_{i,0} (x - x_*) + Σ_k c_{i,k} curl λ_k` for each edge `i`.
#[derive(Clone, Debug)]
pub struct HdivBasis2D {
    poly: Polygon2D,
    x_star: Point2,
    /// `c_{i,0} = |e_i| / (2|T|)`.
    c0: Vec<f64>,
    /// `coeffs[i][k] = c_{i,k}`.
    coeffs: Vec<Vec<f64>>,
    /// `b[i][l] = δ_il |e_l| - |e_i| |T_l| / |T|`.
    b: Vec<Vec<f64>>,
}

/// Builds the basis with the closed-form coefficients; `x_star` defaults to
/// the area centroid.
pub fn build_basis2d(poly: &Polygon2D, x_star: Option<Point2>) -> Result<HdivBasis2D> {
    let x_star = x_star.unwrap_or_else(|| poly.centroid());
    if !poly.contains_interior(&x_star) {
        return Err(Error::Domain(format!("reference point ({}, {}) is not interior", x_star.x, x_star.y)));
    }
    let n = poly.len();
    let area = poly.area();
    let len: Vec<f64> = (0..n).map(|i| poly.edge_length(i)).collect();
    let sub: Vec<f64> = (0..n).map(|l| poly.sub_triangle_area(l, &x_star)).collect();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|l| if i == l { len[l] } else { 0.0 } - len[i] * sub[l] / area)
                .collect()
        })
        .collect();
    let coeffs = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| -(1..n).map(|l| l as f64 * b[i][(k + l) % n]).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let c0 = len.iter().map(|l| l / (2.0 * area)).collect();
    Ok(HdivBasis2D { poly: poly.clone(), x_star, c0, coeffs, b })
}

impl HdivBasis2D {
    pub fn polygon(&self) -> &Polygon2D {
        &self.poly
    }

    pub fn len(&self) -> usize {
        self.c0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c0.is_empty()
    }

    pub fn x_star(&self) -> Point2 {
        self.x_star
    }

    pub fn c0(&self, i: usize) -> f64 {
        self.c0[i]
    }

    pub fn coeffs(&self, i: usize) -> &[f64] {
        &self.coeffs[i]
    }

    pub fn b_table(&self) -> &[Vec<f64>] {
        &self.b
    }

    /// `div q_i = |e_i| / |T|`.
    pub fn divergence(&self, i: usize) -> f64 {
        2.0 * self.c0[i]
    }

    /// All basis values from precomputed coordinates.
    pub fn eval_with(&self, e: &Eval2) -> Vec<Point2> {
        let curls: Vec<Point2> = e.gradients.iter().map(chi).collect();
        let d = e.point - self.x_star;
        (0..self.len())
            .map(|i| {
                let mut q = d * self.c0[i];
                for (c, w) in self.coeffs[i].iter().zip(&curls) {
                    q += w * *c;
                }
                q
            })
            .collect()
    }

    pub fn eval_all(&self, x: &Point2) -> Result<Vec<Point2>> {
        Ok(self.eval_with(&eval2d(&self.poly, x)?))
    }

    pub fn eval(&self, i: usize, x: &Point2) -> Result<Point2> {
        if i >= self.len() {
            return Err(Error::InvalidIndex(format!("basis function {i} of {}", self.len())));
        }
        Ok(self.eval_all(x)?[i])
    }

    /// `Σ a_i q_i(x)`.
    pub fn combine(&self, coeffs: &[f64], x: &Point2) -> Result<Point2> {
        Ok(self.eval_all(x)?.iter().zip(coeffs).map(|(q, a)| q * *a).sum())
    }
}

/// Mean normal flux `(1/|e_j|) ∫_{e_j} q · n_j ds` on every edge.
pub fn edge_fluxes(poly: &Polygon2D, field: impl Fn(&Point2) -> Point2) -> Vec<f64> {
    (0..poly.len())
        .map(|j| {
            let n = poly.outward_normal(j);
            let rule = edge_rule(&poly.vertex(j), &poly.vertex(j + 1), EDGE_FLUX_POINTS).expect("valid rule");
            rule.integrate(|x| field(x).dot(&n)) / poly.edge_length(j)
        })
        .collect()
}

/// Coefficients of `Π_T q` in the basis: the mean normal fluxes themselves.
pub fn interpolate_pi_t(basis: &HdivBasis2D, fluxes: &[f64]) -> Result<Vec<f64>> {
    if fluxes.len() != basis.len() {
        return Err(Error::InvalidArgument(format!(
            "{} fluxes for a basis of size {}",
            fluxes.len(),
            basis.len()
        )));
    }
    if let Some(bad) = fluxes.iter().position(|f| !f.is_finite()) {
        return Err(Error::InvalidArgument(format!("flux {bad} is not finite")));
    }
    Ok(fluxes.to_vec())
}

/// Coefficients of `I_T φ = Σ φ(v_i) λ_i` over the coordinates.
pub fn nodal_interp_i_t(poly: &Polygon2D, vertex_values: &[f64]) -> Result<Vec<f64>> {
    if vertex_values.len() != poly.len() {
        return Err(Error::InvalidArgument(format!(
            "{} vertex values for a {}-gon",
            vertex_values.len(),
            poly.len()
        )));
    }
    Ok(vertex_values.to_vec())
}

/// Evaluates `Σ a_i λ_i` and its gradient.
pub fn eval_nodal(poly: &Polygon2D, coeffs: &[f64], x: &Point2) -> Result<(f64, Point2)> {
    let e = eval2d(poly, x)?;
    let v = e.values.iter().zip(coeffs).map(|(l, a)| l * a).sum();
    let g = e.gradients.iter().zip(coeffs).map(|(g, a)| g * *a).sum();
    Ok((v, g))
}

/// `P_T φ = (1/|T|) ∫_T φ`.
pub fn mean_p_t(poly: &Polygon2D, field: impl Fn(&Point2) -> f64, degree: usize) -> Result<f64> {
    Ok(polygon_rule(poly, degree)?.integrate(field) / poly.area())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CommuteResiduals {
    /// `|div Π_T q - P_T div q|`.
    pub div: f64,
    /// `max |Π_T curl φ - curl I_T φ|` over the samples.
    pub curl: f64,
}

/// Smooth test data for the commuting-diagram check.
pub struct CommuteData<'a> {
    pub phi: &'a dyn Fn(&Point2) -> f64,
    pub grad_phi: &'a dyn Fn(&Point2) -> Point2,
    pub q: &'a dyn Fn(&Point2) -> Point2,
    pub div_q: &'a dyn Fn(&Point2) -> f64,
}

pub fn check_commute(basis: &HdivBasis2D, data: &CommuteData, samples: &[Point2]) -> Result<CommuteResiduals> {
    let poly = basis.polygon();
    let a = interpolate_pi_t(basis, &edge_fluxes(poly, data.q))?;
    let div_pi: f64 = a.iter().enumerate().map(|(i, a)| a * basis.divergence(i)).sum();
    let p_div = mean_p_t(poly, data.div_q, crate::quadrature::DEFAULT_DEGREE)?;

    let curl_coeffs = interpolate_pi_t(basis, &edge_fluxes(poly, |x| chi(&(data.grad_phi)(x))))?;
    let nodal: Vec<f64> = poly.vertices().iter().map(|v| (data.phi)(v)).collect();
    let mut curl = 0.0f64;
    for x in samples {
        let e = eval2d(poly, x)?;
        let lhs: Point2 = basis.eval_with(&e).iter().zip(&curl_coeffs).map(|(q, c)| q * *c).sum();
        let rhs: Point2 = e.gradients.iter().zip(&nodal).map(|(g, p)| chi(g) * *p).sum();
        curl = curl.max((lhs - rhs).norm());
    }
    Ok(CommuteResiduals { div: (div_pi - p_div).abs(), curl })
}

/// Normal traces `q_i · n_j` at `samples_per_edge` points of every edge `j`:
/// `traces[j][k][i]`. Values at offsets `ε` and `2ε` are combined as
/// `2 f(ε) - f(2ε)`, which cancels the first-order offset error.
pub fn normal_traces(basis: &HdivBasis2D, samples_per_edge: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    let poly = basis.polygon();
    (0..poly.len())
        .map(|j| {
            let n = poly.outward_normal(j);
            let near = crate::sampling::polygon_edge_samples_scaled(poly, j, samples_per_edge, 1.0);
            let far = crate::sampling::polygon_edge_samples_scaled(poly, j, samples_per_edge, 2.0);
            near.iter()
                .zip(&far)
                .map(|(a, b)| {
                    let (qa, qb) = (basis.eval_all(a)?, basis.eval_all(b)?);
                    Ok(qa.iter().zip(&qb).map(|(qa, qb)| 2.0 * qa.dot(&n) - qb.dot(&n)).collect())
                })
                .collect()
        })
        .collect()
}

/// Largest `|q_i · n_j - δ_ij|` over the extrapolated edge traces.
pub fn duality_residual(basis: &HdivBasis2D, samples_per_edge: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for (j, edge) in normal_traces(basis, samples_per_edge)?.iter().enumerate() {
        for row in edge {
            for (i, v) in row.iter().enumerate() {
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok(worst)
}
