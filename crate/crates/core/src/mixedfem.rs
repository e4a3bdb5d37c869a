//! Mixed method for `-Δu = f` on the unit square with `u = g` on the
//! boundary: flux `p = ∇u` in the edge-based H(div) space, `u` piecewise
//! constant, so `div p = -f`.
//!
//! The discrete problem is the saddle-point system
//! `(p_h, q) + (u_h, div q) = <g, q·n>` and `(div p_h, v) = -(f, v)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::Serialize;

use crate::elem2d::{build_basis2d, HdivBasis2D, EDGE_FLUX_POINTS};
use crate::error::{Error, Result};
use crate::meshgen::MeshSpec;
use crate::polymesh::{Mesh2D, Point2};
use crate::quadrature::{edge_rule, polygon_rule, DEFAULT_DEGREE};

/// Relative residual accepted from the direct solver.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// A manufactured solution with `p = ∇u` and `f = -div p`.
pub trait ExactSolution {
    fn u(&self, x: &Point2) -> f64;
    fn p(&self, x: &Point2) -> Point2;
    fn div_p(&self, x: &Point2) -> f64;

    fn f(&self, x: &Point2) -> f64 {
        -self.div_p(x)
    }

    fn g(&self, x: &Point2) -> f64 {
        self.u(x)
    }
}

/// `u = sin(πx) sin(πy)`; vanishes on the boundary.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmoothProblem;

impl ExactSolution for SmoothProblem {
    fn u(&self, x: &Point2) -> f64 {
        (PI * x.x).sin() * (PI * x.y).sin()
    }

    fn p(&self, x: &Point2) -> Point2 {
        Point2::new(PI * (PI * x.x).cos() * (PI * x.y).sin(), PI * (PI * x.x).sin() * (PI * x.y).cos())
    }

    fn div_p(&self, x: &Point2) -> f64 {
        -2.0 * PI * PI * self.u(x)
    }
}

/// `u = sqrt((ρ - x)/2) - ρ²/4` with `ρ = |x|`: `-Δu = 1`, `u ∈ H^{3/2}`.
///
/// The singular part is evaluated as `y / sqrt(2(ρ + x))`, which equals
/// `sqrt((ρ - x)/2)` for `y ≥ 0` without the cancellation in `ρ - x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoughProblem;

impl RoughProblem {
    fn singular(x: &Point2) -> f64 {
        let rho = x.norm();
        if rho == 0.0 {
            return 0.0;
        }
        if x.x >= 0.0 {
            x.y.abs() / (2.0 * (rho + x.x)).sqrt()
        } else {
            ((rho - x.x) / 2.0).sqrt()
        }
    }
}

impl ExactSolution for RoughProblem {
    fn u(&self, x: &Point2) -> f64 {
        Self::singular(x) - x.norm_squared() / 4.0
    }

    fn p(&self, x: &Point2) -> Point2 {
        let rho = x.norm();
        let s = Self::singular(x);
        // ∇s = (-s / (2ρ), sqrt(2(ρ + x)) / (4ρ)) for y ≥ 0.
        let grad_s = Point2::new(-s / (2.0 * rho), (2.0 * (rho + x.x)).sqrt() / (4.0 * rho));
        grad_s - x / 2.0
    }

    fn div_p(&self, _: &Point2) -> f64 {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Smooth,
    Rough,
}

impl Problem {
    pub fn exact(self) -> &'static dyn ExactSolution {
        match self {
            Problem::Smooth => &SmoothProblem,
            Problem::Rough => &RoughProblem,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Smooth => "smooth",
            Problem::Rough => "rough",
        }
    }

    /// `div p` is constant for the rough problem, so its error is not reported.
    pub fn reports_div(self) -> bool {
        self == Problem::Smooth
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Problem::Smooth),
            "rough" => Ok(Problem::Rough),
            _ => Err(Error::InvalidArgument(format!("unknown problem '{s}' (smooth, rough)"))),
        }
    }
}

/// Global numbering: flux unknowns are the mesh edges, then one scalar per cell.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub num_flux: usize,
    pub num_cells: usize,
    /// Global edge of each local edge.
    pub cell_dofs: Vec<Vec<usize>>,
    /// `+1` when the local outward normal agrees with the global edge normal.
    pub cell_signs: Vec<Vec<f64>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh2D) -> Self {
        Self {
            num_flux: mesh.num_edges(),
            num_cells: mesh.num_cells(),
            cell_dofs: (0..mesh.num_cells()).map(|c| mesh.cell_edges(c).to_vec()).collect(),
            cell_signs: (0..mesh.num_cells()).map(|c| mesh.cell_edge_signs(c).to_vec()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.num_flux + self.num_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row of cell `c` in the full system.
    pub fn cell_row(&self, c: usize) -> usize {
        self.num_flux + c
    }
}

/// `[[M, Bᵀ], [B, 0]] [p; u] = [G; -F]`.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub num_flux: usize,
    pub num_cells: usize,
    /// Upper and lower triangle of the flux mass matrix, duplicates summed.
    pub mass: BTreeMap<(usize, usize), f64>,
    /// `(cell, edge, ±|e|)`.
    pub div: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl SaddleSystem {
    pub fn len(&self) -> usize {
        self.num_flux + self.num_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triplets(&self) -> Vec<Triplet<usize, usize, f64>> {
        let mut t: Vec<_> = self.mass.iter().map(|(&(i, j), &v)| Triplet::new(i, j, v)).collect();
        for &(c, e, v) in &self.div {
            t.push(Triplet::new(self.num_flux + c, e, v));
            t.push(Triplet::new(e, self.num_flux + c, v));
        }
        t
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        for (&(i, j), &v) in &self.mass {
            y[i] += v * x[j];
        }
        for &(c, e, v) in &self.div {
            y[self.num_flux + c] += v * x[e];
            y[e] += v * x[self.num_flux + c];
        }
        y
    }

    /// `max |M_ij - M_ji|`.
    pub fn mass_asymmetry(&self) -> f64 {
        self.mass
            .iter()
            .map(|(&(i, j), &v)| (v - self.mass.get(&(j, i)).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn mass_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.num_flux, self.num_flux);
        for (&(i, j), &v) in &self.mass {
            m[(i, j)] = v;
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct MixedSolution {
    /// Mean normal flux through each edge along its global normal.
    pub flux: Vec<f64>,
    /// Cell values of `u_h`.
    pub u: Vec<f64>,
    /// `|A x - b| / |b|` (absolute when `b = 0`).
    pub residual: f64,
}

/// Mesh, per-cell bases and numbering for one discretization.
pub struct MixedFem<'m> {
    mesh: &'m Mesh2D,
    bases: Vec<HdivBasis2D>,
    dofs: DofMap,
    degree: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorTriple {
    pub p: f64,
    pub div_p: f64,
    pub u: f64,
}

impl<'m> MixedFem<'m> {
    pub fn new(mesh: &'m Mesh2D) -> Result<Self> {
        Self::with_degree(mesh, DEFAULT_DEGREE)
    }

    pub fn with_degree(mesh: &'m Mesh2D, degree: usize) -> Result<Self> {
        let bases = mesh.polygons().iter().map(|p| build_basis2d(p, None)).collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, bases, dofs: DofMap::new(mesh), degree })
    }

    pub fn mesh(&self) -> &Mesh2D {
        self.mesh
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn basis(&self, cell: usize) -> &HdivBasis2D {
        &self.bases[cell]
    }

    pub fn assemble(&self, f: &dyn Fn(&Point2) -> f64, g: &dyn Fn(&Point2) -> f64) -> Result<SaddleSystem> {
        let nf = self.dofs.num_flux;
        let mut mass = BTreeMap::new();
        let mut div = Vec::new();
        let mut rhs = vec![0.0; self.dofs.len()];
        for (c, poly) in self.mesh.polygons().iter().enumerate() {
            let basis = &self.bases[c];
            let (ids, signs) = (&self.dofs.cell_dofs[c], &self.dofs.cell_signs[c]);
            let rule = polygon_rule(poly, self.degree)?;
            let n = poly.len();
            let mut local = vec![0.0; n * n];
            let mut load = 0.0;
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let q = basis.eval_all(x)?;
                for i in 0..n {
                    for j in i..n {
                        local[i * n + j] += w * q[i].dot(&q[j]);
                    }
                }
                load += w * f(x);
            }
            for i in 0..n {
                for j in i..n {
                    let v = local[i * n + j] * signs[i] * signs[j];
                    *mass.entry((ids[i], ids[j])).or_insert(0.0) += v;
                    if i != j {
                        *mass.entry((ids[j], ids[i])).or_insert(0.0) += v;
                    }
                }
                div.push((c, ids[i], signs[i] * poly.edge_length(i)));
            }
            rhs[nf + c] = -load;
        }
        for (e, edge) in self.mesh.edges().iter().enumerate() {
            if !edge.is_boundary() {
                continue;
            }
            let c = edge.cells[0].or(edge.cells[1]).expect("boundary edge has a cell");
            let local = self.dofs.cell_dofs[c].iter().position(|&d| d == e).expect("edge in cell");
            let (a, b) = (self.mesh.vertices()[edge.from], self.mesh.vertices()[edge.to]);
            let integral = edge_rule(&a, &b, EDGE_FLUX_POINTS)?.integrate(g);
            rhs[e] += self.dofs.cell_signs[c][local] * integral;
        }
        Ok(SaddleSystem { num_flux: nf, num_cells: self.dofs.num_cells, mass, div, rhs })
    }

    /// Sparse LU of the full saddle-point matrix.
    pub fn solve(&self, system: &SaddleSystem) -> Result<MixedSolution> {
        let n = system.len();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &system.triplets())
            .map_err(|e| Error::Singular(format!("sparse matrix: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| Error::Singular(format!("sparse LU: {e:?}")))?;
        let mut x = Mat::from_fn(n, 1, |i, _| system.rhs[i]);
        lu.solve_in_place(x.as_mut());
        let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("saddle-point solve produced non-finite values".into()));
        }
        let ax = system.apply(&x);
        let r = ax.iter().zip(&system.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let bn = system.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        let residual = if bn > 0.0 { r / bn } else { r };
        if residual > SOLVE_TOLERANCE {
            return Err(Error::Singular(format!("saddle-point residual {residual:e}")));
        }
        Ok(MixedSolution { flux: x[..system.num_flux].to_vec(), u: x[system.num_flux..].to_vec(), residual })
    }

    /// Local coefficients of `p_h` on `cell`.
    pub fn cell_coeffs(&self, sol: &MixedSolution, cell: usize) -> Vec<f64> {
        self.dofs.cell_dofs[cell].iter().zip(&self.dofs.cell_signs[cell]).map(|(&d, s)| s * sol.flux[d]).collect()
    }

    pub fn flux_at(&self, sol: &MixedSolution, cell: usize, x: &Point2) -> Result<Point2> {
        self.bases[cell].combine(&self.cell_coeffs(sol, cell), x)
    }

    /// `div p_h` on `cell` (a constant).
    pub fn div_at(&self, sol: &MixedSolution, cell: usize) -> f64 {
        let poly = self.mesh.polygon(cell);
        self.cell_coeffs(sol, cell).iter().enumerate().map(|(i, a)| a * poly.edge_length(i)).sum::<f64>()
            / poly.area()
    }

    /// L² errors by cell-wise quadrature of the configured degree.
    pub fn errors(&self, sol: &MixedSolution, exact: &dyn ExactSolution) -> Result<ErrorTriple> {
        let mut e = ErrorTriple::default();
        for (c, poly) in self.mesh.polygons().iter().enumerate() {
            let rule = polygon_rule(poly, self.degree)?;
            let coeffs = self.cell_coeffs(sol, c);
            let dh = self.div_at(sol, c);
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let ph: Point2 = self.bases[c].combine(&coeffs, x)?;
                e.p += w * (exact.p(x) - ph).norm_squared();
                e.div_p += w * (exact.div_p(x) - dh).powi(2);
                e.u += w * (exact.u(x) - sol.u[c]).powi(2);
            }
        }
        Ok(ErrorTriple { p: e.p.sqrt(), div_p: e.div_p.sqrt(), u: e.u.sqrt() })
    }

    /// `max_T |∫_∂T p_h·n - ∫_T div p|` with `div p = -f`.
    pub fn conservation_residual(&self, sol: &MixedSolution, f: &dyn Fn(&Point2) -> f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for (c, poly) in self.mesh.polygons().iter().enumerate() {
            let out: f64 = self.cell_coeffs(sol, c).iter().enumerate().map(|(i, a)| a * poly.edge_length(i)).sum();
            let load = polygon_rule(poly, self.degree)?.integrate(f);
            worst = worst.max((out + load).abs());
        }
        Ok(worst)
    }

    pub fn solve_problem(&self, exact: &dyn ExactSolution) -> Result<MixedSolution> {
        self.solve(&self.assemble(&|x| exact.f(x), &|x| exact.g(x))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub cells: usize,
    pub err_p: f64,
    pub ord_p: Option<f64>,
    pub err_divp: Option<f64>,
    pub ord_divp: Option<f64>,
    pub err_u: f64,
    pub ord_u: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub problem: String,
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e_coarse / e_fine) / log(N_fine / N_coarse)`; `log₂` of the ratio for dyadic levels.
pub fn observed_order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_default();
        let sci = |v: Option<f64>| v.map(|v| format!("{v:.4e}")).unwrap_or_default();
        let mut s = String::from("N,h,err_p,ord_p,err_divp,ord_divp,err_u,ord_u\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.6e},{},{},{},{},{},{}\n",
                r.n,
                r.h,
                sci(Some(r.err_p)),
                fmt(r.ord_p),
                sci(r.err_divp),
                fmt(r.ord_divp),
                sci(Some(r.err_u)),
                fmt(r.ord_u)
            ));
        }
        s
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

/// Solves `problem` on the family's meshes at each resolution.
pub fn convergence_study(spec: &MeshSpec, levels: &[usize], problem: Problem) -> Result<ConvergenceReport> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("levels must be increasing, got {levels:?}")));
    }
    let exact = problem.exact();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let mesh = MeshSpec { n, ..*spec }.generate()?;
        let fem = MixedFem::new(&mesh)?;
        let sol = fem.solve_problem(exact)?;
        let e = fem.errors(&sol, exact)?;
        let err_divp = problem.reports_div().then_some(e.div_p);
        let (ord_p, ord_divp, ord_u) = match rows.last() {
            Some(prev) => (
                Some(observed_order(prev.err_p, e.p, prev.n, n)),
                prev.err_divp.zip(err_divp).map(|(a, b)| observed_order(a, b, prev.n, n)),
                Some(observed_order(prev.err_u, e.u, prev.n, n)),
            ),
            None => (None, None, None),
        };
        rows.push(ConvergenceRow {
            n,
            h: mesh.max_diameter(),
            cells: mesh.num_cells(),
            err_p: e.p,
            ord_p,
            err_divp,
            ord_divp,
            err_u: e.u,
            ord_u,
        });
    }
    Ok(ConvergenceReport { family: spec.family.name().to_string(), problem: problem.name().to_string(), rows })
}
