//! Lowest-order H(curl) and H(div) elements on a convex polyhedron.
//!
//! `MΛ¹ = span{∇λ_i} + span{W̃_f}` with one basis function `p_e` per edge and
//! `MΛ² = span{curl W̃_f} + span{x - x_*}` with one `q_f` per face. Both bases
//! come from small bordered square systems built on the incidence matrices.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbc::Eval3;
use crate::linalg;
use crate::polymesh::{build_adjacency, AdjacencyMatrices, AdjacencyReport, Point3, Polyhedron, SegmentClass};
use crate::sampling;
use crate::tolerances;
use crate::whitney::{Fields, WhitneyForms};

/// Face samples for normal-trace checks.
pub const FACE_SAMPLES: usize = 20;
/// Edge samples for tangential-trace checks.
pub const EDGE_SAMPLES: usize = 5;
/// Minimum interior grid size for space checks.
pub const GRID_POINTS: usize = 200;
/// Grid points keep this distance (relative to `h`) from the boundary.
pub const GRID_MARGIN: f64 = 0.02;

/// Coordinate values plus `W̃_f` and `curl W̃_f` at one point.
pub struct PointData {
    pub coords: Eval3,
    pub face_forms: Vec<Vector3<f64>>,
    pub face_curls: Vec<Vector3<f64>>,
}

impl PointData {
    pub fn new(forms: &WhitneyForms, x: &Point3) -> Result<Self> {
        let coords = forms.eval_coords(x)?;
        let face_forms = (0..forms.polyhedron().num_faces()).map(|f| forms.face_form(f).eval(&coords)).collect();
        let face_curls = (0..forms.polyhedron().num_faces()).map(|f| forms.face_form(f).curl(&coords)).collect();
        Ok(Self { coords, face_forms, face_curls })
    }
}

/// `q_f = c_{f,0} (x - x_*) + Σ_g c_{f,g} curl W̃_g`.
#[derive(Clone, Debug)]
pub struct HdivBasis3D {
    x_star: Point3,
    /// `c_{f,0} = |f| / (3|T|)`.
    c0: Vec<f64>,
    /// Row `f` holds `c_{f,g}`.
    coeffs: DMatrix<f64>,
    inverse_condition: f64,
}

impl HdivBasis3D {
    pub fn len(&self) -> usize {
        self.c0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c0.is_empty()
    }

    pub fn x_star(&self) -> Point3 {
        self.x_star
    }

    pub fn c0(&self, f: usize) -> f64 {
        self.c0[f]
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Smallest over largest singular value of the bordered system.
    pub fn inverse_condition(&self) -> f64 {
        self.inverse_condition
    }

    /// `div q_f = |f| / |T|`.
    pub fn divergence(&self, f: usize) -> f64 {
        3.0 * self.c0[f]
    }

    pub fn eval_with(&self, d: &PointData) -> Vec<Vector3<f64>> {
        let r = d.coords.point - self.x_star;
        (0..self.len())
            .map(|f| {
                let mut q = r * self.c0[f];
                for (g, c) in d.face_curls.iter().enumerate() {
                    q += c * self.coeffs[(f, g)];
                }
                q
            })
            .collect()
    }

    pub fn eval_all(&self, forms: &WhitneyForms, x: &Point3) -> Result<Vec<Vector3<f64>>> {
        Ok(self.eval_with(&PointData::new(forms, x)?))
    }
}

/// `p_e = Σ_i a_{e,i} ∇λ_i + Σ_f b_{e,f} W̃_f`.
#[derive(Clone, Debug)]
pub struct HcurlBasis3D {
    /// `#E × #V`.
    a: DMatrix<f64>,
    /// `#E × #F`.
    b: DMatrix<f64>,
    inverse_condition: f64,
}

impl HcurlBasis3D {
    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.nrows() == 0
    }

    pub fn vertex_coeffs(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn face_coeffs(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn inverse_condition(&self) -> f64 {
        self.inverse_condition
    }

    pub fn eval_with(&self, d: &PointData) -> Vec<Vector3<f64>> {
        (0..self.len())
            .map(|e| {
                let mut p = Vector3::zeros();
                for (i, g) in d.coords.gradients.iter().enumerate() {
                    p += g * self.a[(e, i)];
                }
                for (f, w) in d.face_forms.iter().enumerate() {
                    p += w * self.b[(e, f)];
                }
                p
            })
            .collect()
    }

    /// `curl p_e = Σ_f b_{e,f} curl W̃_f`.
    pub fn curl_with(&self, d: &PointData) -> Vec<Vector3<f64>> {
        (0..self.len())
            .map(|e| d.face_curls.iter().enumerate().map(|(f, c)| c * self.b[(e, f)]).sum())
            .collect()
    }

    pub fn eval_all(&self, forms: &WhitneyForms, x: &Point3) -> Result<Vec<Vector3<f64>>> {
        Ok(self.eval_with(&PointData::new(forms, x)?))
    }

    pub fn curl_all(&self, forms: &WhitneyForms, x: &Point3) -> Result<Vec<Vector3<f64>>> {
        Ok(self.curl_with(&PointData::new(forms, x)?))
    }
}

fn solve_bordered(system: &DMatrix<f64>, rhs: &DMatrix<f64>, what: &str) -> Result<(DMatrix<f64>, f64)> {
    let inv_cond = linalg::inverse_condition(system);
    if inv_cond <= tolerances::RANK {
        return Err(Error::Singular(format!("{what} bordered system (inverse condition {inv_cond:e})")));
    }
    let sol = system
        .clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Singular(format!("{what} bordered system")))?;
    Ok((sol, inv_cond))
}

/// Solves `[[M^F, 1], [1ᵀ, 0]] [c; μ] = [r; 0]` for every face.
/// `x_star` defaults to the vertex centroid.
pub fn build_qf(forms: &WhitneyForms, adj: &AdjacencyMatrices, x_star: Option<Point3>) -> Result<HdivBasis3D> {
    let poly = forms.polyhedron();
    let x_star = x_star.unwrap_or_else(|| poly.vertex_centroid());
    if !poly.contains_interior(&x_star) {
        return Err(Error::Domain(format!("reference point {x_star:?} is not interior")));
    }
    let nf = poly.num_faces();
    let volume = poly.volume();
    let mut system = DMatrix::zeros(nf + 1, nf + 1);
    system.view_mut((0, 0), (nf, nf)).copy_from(&AdjacencyMatrices::to_f64(&adj.m_f));
    for g in 0..nf {
        system[(g, nf)] = 1.0;
        system[(nf, g)] = 1.0;
    }
    let area: Vec<f64> = poly.faces().iter().map(|f| f.area).collect();
    let pyramid: Vec<f64> = (0..nf).map(|g| poly.sub_pyramid_volume(g, &x_star)).collect();
    // Column f is the right-hand side for q_f.
    let rhs = DMatrix::from_fn(nf + 1, nf, |g, f| {
        if g == nf {
            0.0
        } else {
            (if g == f { area[g] } else { 0.0 }) - pyramid[g] / volume * area[f]
        }
    });
    let (sol, inverse_condition) = solve_bordered(&system, &rhs, "face")?;
    let coeffs = sol.rows(0, nf).transpose();
    let c0 = area.iter().map(|a| a / (3.0 * volume)).collect();
    Ok(HdivBasis3D { x_star, c0, coeffs, inverse_condition })
}

/// Solves `[[A^{VtoE}, A^{FtoE}], [1ᵀ, 0], [0, 1ᵀ]] u = [δ |e'|; 0; 0]` for every edge.
pub fn build_pe(forms: &WhitneyForms, adj: &AdjacencyMatrices) -> Result<HcurlBasis3D> {
    let poly = forms.polyhedron();
    let (ne, nv, nf) = (poly.num_edges(), poly.num_vertices(), poly.num_faces());
    if ne + 2 != nv + nf {
        return Err(Error::Geometry(format!("Euler count fails: V={nv}, E={ne}, F={nf}")));
    }
    let mut system = DMatrix::zeros(ne + 2, ne + 2);
    system.view_mut((0, 0), (ne, nv)).copy_from(&AdjacencyMatrices::to_f64(&adj.a_v_to_e));
    system.view_mut((0, nv), (ne, nf)).copy_from(&AdjacencyMatrices::to_f64(&adj.a_f_to_e));
    for i in 0..nv {
        system[(ne, i)] = 1.0;
    }
    for f in 0..nf {
        system[(ne + 1, nv + f)] = 1.0;
    }
    let rhs = DMatrix::from_fn(ne + 2, ne, |r, e| if r == e { poly.edge_length(e) } else { 0.0 });
    let (sol, inverse_condition) = solve_bordered(&system, &rhs, "edge")?;
    let a = sol.rows(0, nv).transpose();
    let b = sol.rows(nv, nf).transpose();
    Ok(HcurlBasis3D { a, b, inverse_condition })
}

/// Whitney forms plus both bases for one polyhedron.
pub struct Element3D<'a> {
    pub forms: WhitneyForms<'a>,
    pub adjacency: AdjacencyMatrices,
    pub hdiv: HdivBasis3D,
    pub hcurl: HcurlBasis3D,
}

impl<'a> Element3D<'a> {
    pub fn new(poly: &'a Polyhedron) -> Result<Self> {
        Self::from_forms(WhitneyForms::new(poly)?, None)
    }

    pub fn from_forms(forms: WhitneyForms<'a>, x_star: Option<Point3>) -> Result<Self> {
        let adjacency = build_adjacency(forms.polyhedron());
        let hdiv = build_qf(&forms, &adjacency, x_star)?;
        let hcurl = build_pe(&forms, &adjacency)?;
        Ok(Self { forms, adjacency, hdiv, hcurl })
    }

    pub fn polyhedron(&self) -> &'a Polyhedron {
        self.forms.polyhedron()
    }

    pub fn point(&self, x: &Point3) -> Result<PointData> {
        PointData::new(&self.forms, x)
    }

    /// `(p_e, curl p_e, q_f)` at `x`.
    pub fn eval(&self, x: &Point3) -> Result<(Fields, Fields, Fields)> {
        let d = self.point(x)?;
        Ok((self.hcurl.eval_with(&d), self.hcurl.curl_with(&d), self.hdiv.eval_with(&d)))
    }
}

/// Stacks vector samples into a `3·#points × #fields` matrix.
pub fn stack_samples(values: &[Vec<Vector3<f64>>]) -> DMatrix<f64> {
    let ncols = values.first().map_or(0, Vec::len);
    DMatrix::from_fn(3 * values.len(), ncols, |r, c| values[r / 3][c][r % 3])
}

/// Fits each side in the span of the other; returns the larger residual.
pub fn bidirectional_fit(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    linalg::span_fit_residual(a, b).max(linalg::span_fit_residual(b, a))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DualityReport {
    /// `max |q_f · n_g - δ_fg|` over face samples.
    pub face: f64,
    /// `max |p_e · t_e' - δ_ee'|` over edge samples.
    pub edge: f64,
    /// Largest standard deviation of a normal trace along one face.
    pub face_spread: f64,
    /// Largest standard deviation of a tangential trace along one edge.
    pub edge_spread: f64,
}

impl DualityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.face < tol && self.edge < tol
    }
}

fn spread(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs().max(1.0)
}

/// Evaluates `trace` at offsets `ε` and `2ε` and returns `2 f(ε) - f(2ε)`,
/// cancelling the first-order offset error.
fn extrapolated<F>(near: &[Point3], far: &[Point3], mut trace: F) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&Point3) -> Result<Vec<f64>>,
{
    near.iter()
        .zip(far)
        .map(|(a, b)| {
            let (ta, tb) = (trace(a)?, trace(b)?);
            Ok(ta.iter().zip(&tb).map(|(a, b)| 2.0 * a - b).collect())
        })
        .collect()
}

pub fn verify_duality(el: &Element3D) -> Result<DualityReport> {
    let poly = el.polyhedron();
    let mut out = DualityReport::default();
    for g in 0..poly.num_faces() {
        let n = poly.face(g).normal;
        let near = sampling::face_samples_scaled(poly, g, FACE_SAMPLES, 1.0);
        let far = sampling::face_samples_scaled(poly, g, FACE_SAMPLES, 2.0);
        let rows = extrapolated(&near, &far, |x| {
            Ok(el.hdiv.eval_with(&el.point(x)?).iter().map(|q| q.dot(&n)).collect())
        })?;
        for f in 0..el.hdiv.len() {
            let t: Vec<f64> = rows.iter().map(|r| r[f]).collect();
            for v in &t {
                out.face = out.face.max((v - if f == g { 1.0 } else { 0.0 }).abs());
            }
            out.face_spread = out.face_spread.max(spread(&t));
        }
    }
    for e2 in 0..poly.num_edges() {
        let t = poly.edge_vector(e2).normalize();
        let near = sampling::edge_samples_scaled(poly, e2, EDGE_SAMPLES, 1.0);
        let far = sampling::edge_samples_scaled(poly, e2, EDGE_SAMPLES, 2.0);
        let rows = extrapolated(&near, &far, |x| {
            Ok(el.hcurl.eval_with(&el.point(x)?).iter().map(|p| p.dot(&t)).collect())
        })?;
        for e in 0..el.hcurl.len() {
            let tr: Vec<f64> = rows.iter().map(|r| r[e]).collect();
            for v in &tr {
                out.edge = out.edge.max((v - if e == e2 { 1.0 } else { 0.0 }).abs());
            }
            out.edge_spread = out.edge_spread.max(spread(&tr));
        }
    }
    Ok(out)
}

/// Dimensions and inclusions of the discrete sequence `MΛ⁰ → MΛ¹ → MΛ² → ℝ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_faces: usize,
    /// Numerical ranks of the sampled bases.
    pub dim_m0: usize,
    pub dim_m1: usize,
    pub dim_m2: usize,
    /// Rank of the sampled `curl p_e`; equals `#F - 1` for an exact sequence.
    pub rank_curl: usize,
    /// Rank of the sampled `∇λ_i`; equals `#V - 1`.
    pub rank_grad: usize,
    /// Residual of fitting every `∇λ_i` in `span{p_e}`.
    pub grad_in_m1: f64,
    /// Residual of fitting every `curl p_e` in `span{q_f}`.
    pub curl_in_m2: f64,
    /// Largest `|curl|` of the fitted gradients.
    pub curl_of_grad: f64,
    /// `min_f div q_f` relative to the largest; positive means `div MΛ² = ℝ`.
    pub div_onto: f64,
    pub points: usize,
}

impl ExactnessReport {
    pub fn dims_match(&self) -> bool {
        self.dim_m0 == self.num_vertices
            && self.dim_m1 == self.num_edges
            && self.dim_m2 == self.num_faces
            && self.num_edges == (self.num_vertices - 1) + (self.num_faces - 1)
            && self.rank_curl + 1 == self.num_faces
            && self.rank_grad + 1 == self.num_vertices
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.dims_match()
            && self.grad_in_m1 < tol
            && self.curl_in_m2 < tol
            && self.curl_of_grad < tol
            && self.div_onto > 0.0
    }
}

pub fn check_exactness(el: &Element3D, points: &[Point3]) -> Result<ExactnessReport> {
    let poly = el.polyhedron();
    let (mut lam, mut grads, mut ps, mut curls, mut qs) = (vec![], vec![], vec![], vec![], vec![]);
    for x in points {
        let d = el.point(x)?;
        lam.push(d.coords.values.clone());
        grads.push(d.coords.gradients.clone());
        ps.push(el.hcurl.eval_with(&d));
        curls.push(el.hcurl.curl_with(&d));
        qs.push(el.hdiv.eval_with(&d));
    }
    let m0 = DMatrix::from_fn(lam.len(), poly.num_vertices(), |r, c| lam[r][c]);
    let (g, p, c, q) = (stack_samples(&grads), stack_samples(&ps), stack_samples(&curls), stack_samples(&qs));

    // curl of a field in span{p_e} is Σ coef · curl p_e.
    let svd = p.clone().svd(true, true);
    let eps = tolerances::RANK * svd.singular_values.max();
    let mut grad_in_m1 = 0.0f64;
    let mut curl_of_grad = 0.0f64;
    for i in 0..g.ncols() {
        let t = g.column(i).into_owned();
        let coef = svd.solve(&t, eps).map_err(|e| Error::Singular(e.to_string()))?;
        grad_in_m1 = grad_in_m1.max((&p * &coef - t).amax());
        curl_of_grad = curl_of_grad.max((&c * coef).amax());
    }
    let divs: Vec<f64> = (0..el.hdiv.len()).map(|f| el.hdiv.divergence(f)).collect();
    let dmax = divs.iter().copied().fold(0.0, f64::max);
    Ok(ExactnessReport {
        num_vertices: poly.num_vertices(),
        num_edges: poly.num_edges(),
        num_faces: poly.num_faces(),
        dim_m0: linalg::numerical_rank(&m0, tolerances::RANK),
        dim_m1: linalg::numerical_rank(&p, tolerances::RANK),
        dim_m2: linalg::numerical_rank(&q, tolerances::RANK),
        rank_curl: linalg::numerical_rank(&c, 1e-8),
        rank_grad: linalg::numerical_rank(&g, 1e-8),
        grad_in_m1,
        curl_in_m2: linalg::span_fit_residual(&q, &c),
        curl_of_grad,
        div_onto: divs.iter().copied().fold(f64::INFINITY, f64::min) / dmax,
        points: points.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolyType {
    /// No interior vertex-to-vertex segments.
    TypeI,
    /// Has a center `x_c` with `(x_c - v_i) × Σ_j τ_ij = 0` at every vertex.
    TypeII,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub kind: PolyType,
    pub interior_segments: usize,
    pub center: [f64; 3],
    /// `max_i |(x_c - v_i) × Σ_j τ_ij|`, relative to `h²`.
    pub center_residual: f64,
}

/// Type I takes precedence when both apply. `center` defaults to the vertex centroid.
pub fn classify_type(poly: &Polyhedron, center: Option<Point3>) -> Classification {
    let xc = center.unwrap_or_else(|| poly.vertex_centroid());
    let n = poly.num_vertices();
    let interior = (0..n)
        .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
        .filter(|&(i, k)| poly.classify(i, k) == Some(SegmentClass::Interior))
        .count();
    let h2 = poly.diameter().powi(2);
    let center_residual = (0..n)
        .map(|i| {
            let sum: Point3 = poly.vertex_neighbours(i).iter().map(|&j| poly.vertex(j) - poly.vertex(i)).sum();
            (xc - poly.vertex(i)).cross(&sum).norm() / h2
        })
        .fold(0.0, f64::max);
    let kind = if interior == 0 {
        PolyType::TypeI
    } else if center_residual < tolerances::TYPE_II_CENTER {
        PolyType::TypeII
    } else {
        PolyType::Neither
    };
    Classification { kind, interior_segments: interior, center: [xc.x, xc.y, xc.z], center_residual }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InclusionResiduals {
    /// Fit of `e_m` and `e_m × x` in `span{p_e}`.
    pub hcurl: f64,
    /// Fit of `e_m` and `x` in `span{q_f}`.
    pub hdiv: f64,
    /// Fit of the constants alone in `span{q_f}`.
    pub hdiv_constants: f64,
}

impl InclusionResiduals {
    pub fn max(&self) -> f64 {
        self.hcurl.max(self.hdiv).max(self.hdiv_constants)
    }
}

fn unit(m: usize) -> Vector3<f64> {
    let mut v = Vector3::zeros();
    v[m] = 1.0;
    v
}

pub fn check_p1minus_inclusion(el: &Element3D, points: &[Point3]) -> Result<InclusionResiduals> {
    let (mut ps, mut qs, mut k1, mut k2) = (vec![], vec![], vec![], vec![]);
    for x in points {
        let d = el.point(x)?;
        ps.push(el.hcurl.eval_with(&d));
        qs.push(el.hdiv.eval_with(&d));
        let mut g1: Vec<Vector3<f64>> = (0..3).map(unit).collect();
        g1.extend((0..3).map(|m| unit(m).cross(x)));
        k1.push(g1);
        let mut g2: Vec<Vector3<f64>> = (0..3).map(unit).collect();
        g2.push(*x);
        k2.push(g2);
    }
    let (p, q) = (stack_samples(&ps), stack_samples(&qs));
    let k2 = stack_samples(&k2);
    Ok(InclusionResiduals {
        hcurl: linalg::span_fit_residual(&p, &stack_samples(&k1)),
        hdiv: linalg::span_fit_residual(&q, &k2),
        hdiv_constants: linalg::span_fit_residual(&q, &k2.columns(0, 3).into_owned()),
    })
}

/// Largest in-face component of `p_e - |e| W̃_e` over extrapolated face samples.
pub fn check_tangential_trace(el: &Element3D) -> Result<f64> {
    let poly = el.polyhedron();
    let mut worst = 0.0f64;
    for f in 0..poly.num_faces() {
        let n = poly.face(f).normal;
        let near = sampling::face_samples_scaled(poly, f, FACE_SAMPLES, 1.0);
        let far = sampling::face_samples_scaled(poly, f, FACE_SAMPLES, 2.0);
        let rows = extrapolated(&near, &far, |x| {
            let d = el.point(x)?;
            let mut out = Vec::with_capacity(3 * el.hcurl.len());
            for (e, p) in el.hcurl.eval_with(&d).iter().enumerate() {
                let diff = p - el.forms.edge_form(e).eval(&d.coords) * poly.edge_length(e);
                out.extend((diff - n * n.dot(&diff)).iter());
            }
            Ok(out)
        })?;
        for r in rows {
            for c in r.chunks(3) {
                worst = worst.max(Vector3::new(c[0], c[1], c[2]).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TypeIISolvability {
    /// Per vertex: `|Σ_{e_ij ∈ E} (a × (v_i - x_c)) · τ_ij|`.
    pub vertex_residuals: Vec<f64>,
    /// `b_e = (a × (v_i - x_c)) · τ_ij` over E⁺.
    pub rhs: Vec<f64>,
    /// Least-squares `C` with `A^{FtoE} C = b`.
    pub coefficients: Vec<f64>,
    pub reconstruction_residual: f64,
}

impl TypeIISolvability {
    pub fn solvable(&self, tol: f64) -> bool {
        self.vertex_residuals.iter().all(|r| *r < tol) && self.reconstruction_residual < tol
    }
}

pub fn check_type_ii_solvability(
    poly: &Polyhedron,
    adj: &AdjacencyMatrices,
    xc: &Point3,
    a: &Vector3<f64>,
) -> TypeIISolvability {
    let vertex_residuals = (0..poly.num_vertices())
        .map(|i| {
            let r = a.cross(&(poly.vertex(i) - xc));
            poly.vertex_neighbours(i).iter().map(|&j| r.dot(&(poly.vertex(j) - poly.vertex(i)))).sum::<f64>().abs()
        })
        .collect();
    let rhs: Vec<f64> = poly
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| a.cross(&(poly.vertex(e.from) - xc)).dot(&poly.edge_vector(id)))
        .collect();
    let afe = AdjacencyMatrices::to_f64(&adj.a_f_to_e);
    let b = DVector::from_vec(rhs.clone());
    let c = linalg::lstsq(&afe, &b);
    let reconstruction_residual = (&afe * &c - b).amax();
    TypeIISolvability { vertex_residuals, rhs, coefficients: c.iter().copied().collect(), reconstruction_residual }
}

/// Everything the verification driver reports for one polyhedron.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub dims: [usize; 3],
    pub adjacency: AdjacencyReport,
    pub inverse_condition_face_system: f64,
    pub inverse_condition_edge_system: f64,
    pub duality: DualityReport,
    pub exactness: ExactnessReport,
    pub classification: Classification,
    pub inclusion: InclusionResiduals,
    pub tangential_trace: f64,
    /// `max |Σ∇λ_i|` and `max |Σ W̃_f|`: the gauge directions generate zero.
    pub gauge_nullity: f64,
}

/// Pass thresholds for [`VerificationReport::passed_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyTolerances {
    pub duality: f64,
    pub space_fit: f64,
    pub inclusion: f64,
    pub tangential_trace: f64,
    pub gauge: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            duality: tolerances::DUALITY_3D,
            space_fit: tolerances::SPACE_FIT,
            inclusion: tolerances::P1_MINUS_INCLUSION,
            tangential_trace: tolerances::TANGENTIAL_TRACE,
            gauge: 1e-10,
        }
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.passed_with(&VerifyTolerances::default())
    }

    /// Inclusion is only claimed for Type I and II cells.
    pub fn passed_with(&self, tol: &VerifyTolerances) -> bool {
        let inclusion_ok = self.classification.kind == PolyType::Neither || self.inclusion.max() < tol.inclusion;
        self.adjacency.passed()
            && self.inverse_condition_face_system > tolerances::RANK
            && self.inverse_condition_edge_system > tolerances::RANK
            && self.duality.passed(tol.duality)
            && self.exactness.passed(tol.space_fit)
            && self.tangential_trace < tol.tangential_trace
            && self.gauge_nullity < tol.gauge
            && inclusion_ok
    }
}

pub fn verify_polyhedron(name: &str, poly: &Polyhedron, center: Option<Point3>) -> Result<VerificationReport> {
    let el = Element3D::new(poly)?;
    let points = sampling::interior_grid_3d(poly, GRID_POINTS, GRID_MARGIN);
    let mut gauge = 0.0f64;
    for x in &points {
        let d = el.point(x)?;
        let g: Vector3<f64> = d.coords.gradients.iter().sum();
        let w: Vector3<f64> = d.face_forms.iter().sum();
        gauge = gauge.max(g.norm()).max(w.norm());
    }
    Ok(VerificationReport {
        name: name.to_string(),
        dims: [poly.num_vertices(), poly.num_edges(), poly.num_faces()],
        adjacency: el.adjacency.report(poly),
        inverse_condition_face_system: el.hdiv.inverse_condition(),
        inverse_condition_edge_system: el.hcurl.inverse_condition(),
        duality: verify_duality(&el)?,
        exactness: check_exactness(&el, &points)?,
        classification: classify_type(poly, center),
        inclusion: check_p1minus_inclusion(&el, &points)?,
        tangential_trace: check_tangential_trace(&el)?,
        gauge_nullity: gauge,
    })
}
