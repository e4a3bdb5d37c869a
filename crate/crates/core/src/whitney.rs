//! Whitney forms `W_ij`, `W_ijk` and the modified edge and face forms `W̃_ij`,
//! `W̃_f` on a convex polyhedron.
//!
//! `W̃_ij` and `W̃_f` are stored as linear combinations of `W_ab` with `a < b`,
//! so values and curls follow from `λ` and `∇λ` at a point without any
//! numerical differentiation.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbc::{BarycentricEval, Eval3, Wachspress3D};
use crate::linalg;
use crate::polymesh::{Point3, Polyhedron, SegmentClass};
use crate::tolerances;

/// One vector per basis function, sampled at a single point.
pub type Fields = Vec<Vector3<f64>>;

/// `W_ij = λ_i ∇λ_j - λ_j ∇λ_i`.
pub fn w1<const D: usize>(e: &BarycentricEval<D>, i: usize, j: usize) -> SVector<f64, D> {
    e.gradients[j] * e.values[i] - e.gradients[i] * e.values[j]
}

/// `W_ijk = λ_i ∇λ_j×∇λ_k - λ_j ∇λ_i×∇λ_k + λ_k ∇λ_i×∇λ_j`.
pub fn w2(e: &Eval3, i: usize, j: usize, k: usize) -> Vector3<f64> {
    let (g, l) = (&e.gradients, &e.values);
    g[j].cross(&g[k]) * l[i] - g[i].cross(&g[k]) * l[j] + g[i].cross(&g[j]) * l[k]
}

/// `curl W_ij = 2 ∇λ_i × ∇λ_j`.
pub fn curl_w1(e: &Eval3, i: usize, j: usize) -> Vector3<f64> {
    e.gradients[i].cross(&e.gradients[j]) * 2.0
}

/// A linear combination `Σ c_ab W_ab` with `a < b`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PairForm {
    pub terms: Vec<(usize, usize, f64)>,
}

impl PairForm {
    fn from_map(map: BTreeMap<(usize, usize), f64>) -> Self {
        Self { terms: map.into_iter().filter(|(_, c)| *c != 0.0).map(|((a, b), c)| (a, b, c)).collect() }
    }

    fn accumulate(map: &mut BTreeMap<(usize, usize), f64>, i: usize, j: usize, c: f64) {
        if i == j {
            return;
        }
        let (key, s) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        *map.entry(key).or_insert(0.0) += s;
    }

    pub fn eval(&self, e: &Eval3) -> Vector3<f64> {
        self.terms.iter().map(|&(a, b, c)| w1(e, a, b) * c).sum()
    }

    pub fn curl(&self, e: &Eval3) -> Vector3<f64> {
        self.terms.iter().map(|&(a, b, c)| curl_w1(e, a, b) * c).sum()
    }
}

fn columns(vs: &[Vector3<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(3, vs.len(), |r, c| vs[c][r])
}

/// Chooses the coefficients `C^{ik}_{ij}` expressing an interior segment
/// `τ_ik` through the edge vectors `τ_ij` at vertex `i`.
pub trait CombinationPolicy {
    fn combine(&self, target: &Vector3<f64>, edge_vectors: &[Vector3<f64>]) -> Vec<f64>;
}

/// Minimum Euclidean norm exact solution.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinimumNorm;

impl CombinationPolicy for MinimumNorm {
    fn combine(&self, target: &Vector3<f64>, edge_vectors: &[Vector3<f64>]) -> Vec<f64> {
        let a = columns(edge_vectors);
        let c = linalg::pseudo_inverse(&a) * DVector::from_column_slice(target.as_slice());
        c.iter().copied().collect()
    }
}

/// Exact solution supported on the first three independent edge vectors in
/// edge order. Differs from [`MinimumNorm`] at vertices of degree above three.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstIndependent;

impl CombinationPolicy for FirstIndependent {
    fn combine(&self, target: &Vector3<f64>, edge_vectors: &[Vector3<f64>]) -> Vec<f64> {
        let scale = edge_vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut chosen = Vec::new();
        for (k, v) in edge_vectors.iter().enumerate() {
            let mut cols: Vec<Vector3<f64>> = chosen.iter().map(|&c| edge_vectors[c]).collect();
            cols.push(*v);
            let m = columns(&cols);
            if linalg::numerical_rank(&m, 1e-8) == cols.len() && v.norm() > 1e-12 * scale {
                chosen.push(k);
            }
            if chosen.len() == 3 {
                break;
            }
        }
        let cols: Vec<Vector3<f64>> = chosen.iter().map(|&c| edge_vectors[c]).collect();
        let sol = linalg::lstsq(&columns(&cols), &DVector::from_column_slice(target.as_slice()));
        let mut out = vec![0.0; edge_vectors.len()];
        for (k, &c) in chosen.iter().enumerate() {
            out[c] = sol[k];
        }
        out
    }
}

/// Coefficients `C^{ik}_{ij}` for every interior segment `e_ik`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InteriorCombination {
    /// `(i, k) -> [(j, C^{ik}_{ij})]` over the edge neighbours `j` of `i`.
    pub table: BTreeMap<(usize, usize), Vec<(usize, f64)>>,
}

impl InteriorCombination {
    pub fn coefficient(&self, i: usize, k: usize, j: usize) -> f64 {
        self.table
            .get(&(i, k))
            .and_then(|row| row.iter().find(|(jj, _)| *jj == j).map(|(_, c)| *c))
            .unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Largest `|Σ_j C τ_ij - τ_ik| / |τ_ik|` over the table.
    pub fn max_residual(&self, poly: &Polyhedron) -> f64 {
        self.table
            .iter()
            .map(|(&(i, k), row)| {
                let target = poly.vertex(k) - poly.vertex(i);
                let sum: Point3 = row.iter().map(|&(j, c)| (poly.vertex(j) - poly.vertex(i)) * c).sum();
                (sum - target).norm() / target.norm()
            })
            .fold(0.0, f64::max)
    }
}

pub fn build_interior_combinations(
    poly: &Polyhedron,
    policy: &dyn CombinationPolicy,
) -> Result<InteriorCombination> {
    let mut table = BTreeMap::new();
    for i in 0..poly.num_vertices() {
        let mut nbrs = poly.vertex_neighbours(i);
        nbrs.sort_unstable();
        let taus: Vec<Vector3<f64>> = nbrs.iter().map(|&j| poly.vertex(j) - poly.vertex(i)).collect();
        for k in 0..poly.num_vertices() {
            if poly.classify(i, k) != Some(SegmentClass::Interior) {
                continue;
            }
            let target = poly.vertex(k) - poly.vertex(i);
            let c = policy.combine(&target, &taus);
            let sum: Vector3<f64> = taus.iter().zip(&c).map(|(t, c)| t * *c).sum();
            let res = (sum - target).norm();
            if res > tolerances::INTERIOR_COMBINATION * target.norm() {
                return Err(Error::Geometry(format!(
                    "segment {i}->{k} is not reproduced by the edges at vertex {i} (residual {res:e})"
                )));
            }
            table.insert((i, k), nbrs.iter().copied().zip(c).collect());
        }
    }
    Ok(InteriorCombination { table })
}

/// Expansion of `W̃_ij` for the edge `i -> j`.
fn tilde_edge_form(poly: &Polyhedron, comb: &InteriorCombination, i: usize, j: usize) -> PairForm {
    let mut map = BTreeMap::new();
    PairForm::accumulate(&mut map, i, j, 1.0);
    let (e, _) = poly.edge_between(i, j).expect("edge");
    let vij = poly.edge_face_vertices(e);
    for &k in &vij {
        if poly.classify(i, k) == Some(SegmentClass::Surface) {
            PairForm::accumulate(&mut map, i, k, 0.5);
        }
        if poly.classify(j, k) == Some(SegmentClass::Surface) {
            PairForm::accumulate(&mut map, j, k, -0.5);
        }
    }
    for k in 0..poly.num_vertices() {
        if poly.classify(i, k) == Some(SegmentClass::Interior) {
            PairForm::accumulate(&mut map, i, k, 0.5 * comb.coefficient(i, k, j));
        }
        if poly.classify(j, k) == Some(SegmentClass::Interior) {
            PairForm::accumulate(&mut map, j, k, -0.5 * comb.coefficient(j, k, i));
        }
    }
    PairForm::from_map(map)
}

/// Whitney forms bound to one polyhedron.
#[derive(Clone, Debug)]
pub struct WhitneyForms<'a> {
    coords: Wachspress3D<'a>,
    combination: InteriorCombination,
    /// `W̃_e` for each edge of E⁺ in its fixed direction.
    edge_forms: Vec<PairForm>,
    /// `W̃_f = Σ_{e_ij ∈ ∂f} W̃_ij`.
    face_forms: Vec<PairForm>,
}

impl<'a> WhitneyForms<'a> {
    pub fn new(poly: &'a Polyhedron) -> Result<Self> {
        Self::with_policy(poly, &MinimumNorm)
    }

    pub fn with_policy(poly: &'a Polyhedron, policy: &dyn CombinationPolicy) -> Result<Self> {
        let combination = build_interior_combinations(poly, policy)?;
        let edge_forms: Vec<PairForm> =
            poly.edges().iter().map(|e| tilde_edge_form(poly, &combination, e.from, e.to)).collect();
        let face_forms = poly
            .faces()
            .iter()
            .map(|f| {
                let mut map = BTreeMap::new();
                for (&e, &s) in f.edges.iter().zip(&f.edge_signs) {
                    for &(a, b, c) in &edge_forms[e].terms {
                        PairForm::accumulate(&mut map, a, b, c * s as f64);
                    }
                }
                PairForm::from_map(map)
            })
            .collect();
        Ok(Self { coords: Wachspress3D::new(poly), combination, edge_forms, face_forms })
    }

    pub fn polyhedron(&self) -> &'a Polyhedron {
        self.coords.polyhedron()
    }

    pub fn coords(&self) -> &Wachspress3D<'a> {
        &self.coords
    }

    pub fn combination(&self) -> &InteriorCombination {
        &self.combination
    }

    pub fn edge_form(&self, e: usize) -> &PairForm {
        &self.edge_forms[e]
    }

    pub fn face_form(&self, f: usize) -> &PairForm {
        &self.face_forms[f]
    }

    pub fn eval_coords(&self, x: &Point3) -> Result<Eval3> {
        self.coords.eval(x)
    }

    pub fn eval_w1(&self, i: usize, j: usize, x: &Point3) -> Result<Vector3<f64>> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(w1(&self.coords.eval(x)?, i, j))
    }

    pub fn eval_w2(&self, i: usize, j: usize, k: usize, x: &Point3) -> Result<Vector3<f64>> {
        for v in [i, j, k] {
            self.check_vertex(v)?;
        }
        Ok(w2(&self.coords.eval(x)?, i, j, k))
    }

    /// `W̃_ij` for an edge `e_ij ∈ E` in either direction.
    pub fn eval_tilde_w(&self, i: usize, j: usize, x: &Point3) -> Result<Vector3<f64>> {
        let (e, s) = self
            .polyhedron()
            .edge_between(i, j)
            .ok_or_else(|| Error::InvalidIndex(format!("({i}, {j}) is not an edge")))?;
        Ok(self.edge_forms[e].eval(&self.coords.eval(x)?) * s as f64)
    }

    pub fn eval_tilde_wf(&self, f: usize, x: &Point3) -> Result<Vector3<f64>> {
        let form = self.face_forms.get(f).ok_or_else(|| Error::InvalidIndex(format!("face {f}")))?;
        Ok(form.eval(&self.coords.eval(x)?))
    }

    pub fn eval_curl_tilde_wf(&self, f: usize, x: &Point3) -> Result<Vector3<f64>> {
        let form = self.face_forms.get(f).ok_or_else(|| Error::InvalidIndex(format!("face {f}")))?;
        Ok(form.curl(&self.coords.eval(x)?))
    }

    /// All `W̃_e`, `W̃_f` and `curl W̃_f` from one coordinate evaluation.
    pub fn all_at(&self, e: &Eval3) -> (Fields, Fields, Fields) {
        (
            self.edge_forms.iter().map(|f| f.eval(e)).collect(),
            self.face_forms.iter().map(|f| f.eval(e)).collect(),
            self.face_forms.iter().map(|f| f.curl(e)).collect(),
        )
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.polyhedron().num_vertices() {
            return Err(Error::InvalidIndex(format!("vertex {v}")));
        }
        Ok(())
    }
}

/// Residuals of the constant and rotation reproduction identities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ReproductionResiduals {
    /// `max |Σ_{i<j} (a·τ_ij) W_ij - a|`.
    pub whitney: f64,
    /// `max |Σ_{e_ij ∈ E} (b·τ_ij) W̃_ij - 2b|`.
    pub tilde: f64,
    /// `max |Σ_{e_ij ∈ E} ((a×v_i)·τ_ij) W̃_ij - 2 a×x|`.
    pub rotation: f64,
}

pub fn check_constant_reproduction(
    forms: &WhitneyForms,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    points: &[Point3],
) -> Result<ReproductionResiduals> {
    let poly = forms.polyhedron();
    let n = poly.num_vertices();
    let mut out = ReproductionResiduals::default();
    for x in points {
        let e = forms.eval_coords(x)?;
        let mut s = Vector3::zeros();
        for i in 0..n {
            for j in i + 1..n {
                s += w1(&e, i, j) * a.dot(&(poly.vertex(j) - poly.vertex(i)));
            }
        }
        out.whitney = out.whitney.max((s - a).norm());
        // Each edge appears twice in E with the same summand.
        let mut t = Vector3::zeros();
        let mut r = Vector3::zeros();
        for (id, edge) in poly.edges().iter().enumerate() {
            let tau = poly.edge_vector(id);
            let wt = forms.edge_form(id).eval(&e);
            t += wt * (2.0 * b.dot(&tau));
            r += wt * (2.0 * a.cross(&poly.vertex(edge.from)).dot(&tau));
        }
        out.tilde = out.tilde.max((t - b * 2.0).norm());
        out.rotation = out.rotation.max((r - a.cross(x) * 2.0).norm());
    }
    Ok(out)
}
