//! Mesh families on the unit square: distorted quadrilaterals, hexagonal
//! duals of a uniform triangulation, and centroidal Voronoi tessellations.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polymesh::{cross2, Mesh2D, Point2, Polygon2D};
use crate::quadrature::polygon_rule;

/// Default Lloyd iteration count.
pub const DEFAULT_LLOYD_ITERS: usize = 64;
/// Default jitter of the initial CVT generators, in units of the grid spacing.
pub const DEFAULT_JITTER: f64 = 0.35;
/// Default quad distortion.
pub const DEFAULT_DISTORTION: f64 = 0.3;
/// Voronoi vertices closer than this are merged.
const MERGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quad,
    Hexdual,
    Cvt,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Quad, Family::Hexdual, Family::Cvt];

    pub fn name(self) -> &'static str {
        match self {
            Family::Quad => "quad",
            Family::Hexdual => "hexdual",
            Family::Cvt => "cvt",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Family::Quad),
            "hexdual" => Ok(Family::Hexdual),
            "cvt" => Ok(Family::Cvt),
            _ => Err(Error::InvalidArgument(format!("unknown mesh family '{s}' (quad, hexdual, cvt)"))),
        }
    }
}

/// Everything needed to regenerate a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshSpec {
    pub family: Family,
    pub n: usize,
    pub distortion: f64,
    pub iters: usize,
    pub seed: u64,
    pub jitter: f64,
}

impl MeshSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n, distortion: DEFAULT_DISTORTION, iters: DEFAULT_LLOYD_ITERS, seed: 0, jitter: DEFAULT_JITTER }
    }

    pub fn generate(&self) -> Result<Mesh2D> {
        match self.family {
            Family::Quad => gen_quad(self.n, self.distortion),
            Family::Hexdual => gen_hexdual(self.n),
            Family::Cvt => gen_cvt_with(self.n, self.iters, self.seed, self.jitter).map(|(m, _)| m),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 2, got {n}")));
    }
    Ok(())
}

/// `N × N` grid with interior vertices moved by
/// `(d/N) (sin(1.7i + 2.9j), sin(2.3i - 1.3j))`.
///
/// Every corner cross product is at least `(1 - 4d)/N²`, so `d < 1/4` always
/// gives convex cells. Larger `d` (up to 1/2) is accepted when the resulting
/// cells happen to be convex; otherwise the offending cell is reported.
pub fn gen_quad(n: usize, distortion: f64) -> Result<Mesh2D> {
    check_n(n)?;
    if !(0.0..0.5).contains(&distortion) {
        return Err(Error::InvalidArgument(format!("distortion must lie in [0, 0.5), got {distortion}")));
    }
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = Point2::new(i as f64 * h, j as f64 * h);
            if i > 0 && i < n && j > 0 && j < n {
                let (fi, fj) = (i as f64, j as f64);
                p += Point2::new((1.7 * fi + 2.9 * fj).sin(), (2.3 * fi - 1.3 * fj).sin()) * (distortion * h);
            }
            vertices.push(p);
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let cell = vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            let pts = cell.iter().map(|&v| vertices[v]).collect();
            if let Err(e) = Polygon2D::new(pts) {
                return Err(Error::Geometry(format!("cell {} is not strictly convex: {e}", cells.len())));
            }
            cells.push(cell);
        }
    }
    Mesh2D::new(vertices, cells)
}

/// Deduplicates points that live on a lattice of spacing `1/scale`.
struct LatticeIndex {
    scale: f64,
    ids: HashMap<(i64, i64), usize>,
    points: Vec<Point2>,
}

impl LatticeIndex {
    fn new(scale: f64) -> Self {
        Self { scale, ids: HashMap::new(), points: Vec::new() }
    }

    fn id(&mut self, p: Point2) -> usize {
        let key = ((p.x * self.scale).round() as i64, (p.y * self.scale).round() as i64);
        let next = self.points.len();
        *self.ids.entry(key).or_insert_with(|| {
            self.points.push(p);
            next
        })
    }
}

/// Orders the points of a convex cell counter-clockwise around their mean.
fn sort_ccw(points: &mut [Point2]) {
    let c = points.iter().sum::<Point2>() / points.len() as f64;
    points.sort_by(|a, b| {
        let (ta, tb) = ((a.y - c.y).atan2(a.x - c.x), (b.y - c.y).atan2(b.x - c.x));
        ta.total_cmp(&tb)
    });
}

/// Barycentric dual of the `N × N` right-triangle mesh whose squares are
/// split along the `(i, j) -> (i+1, j+1)` diagonal. Each vertex gets one cell
/// through the centroids of its triangles; boundary cells close through the
/// boundary edge midpoints and, at corners, the corner itself.
pub fn gen_hexdual(n: usize) -> Result<Mesh2D> {
    check_n(n)?;
    let h = 1.0 / n as f64;
    let node = |i: usize, j: usize| Point2::new(i as f64 * h, j as f64 * h);
    // Triangles incident to each grid node.
    let mut incident: Vec<Vec<Point2>> = vec![Vec::new(); (n + 1) * (n + 1)];
    let id = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            for tri in [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]] {
                let c = tri.iter().map(|&(a, b)| node(a, b)).sum::<Point2>() / 3.0;
                for &(a, b) in &tri {
                    incident[id(a, b)].push(c);
                }
            }
        }
    }
    // All cell vertices sit on the lattice of spacing h/6.
    let mut index = LatticeIndex::new(6.0 * n as f64);
    let mut cells = Vec::with_capacity(incident.len());
    for j in 0..=n {
        for i in 0..=n {
            let mut pts = incident[id(i, j)].clone();
            let v = node(i, j);
            let on_x = i == 0 || i == n;
            let on_y = j == 0 || j == n;
            if on_x {
                for jj in [j.wrapping_sub(1), j + 1] {
                    if jj <= n {
                        pts.push((v + node(i, jj)) / 2.0);
                    }
                }
            }
            if on_y {
                for ii in [i.wrapping_sub(1), i + 1] {
                    if ii <= n {
                        pts.push((v + node(ii, j)) / 2.0);
                    }
                }
            }
            if on_x && on_y {
                pts.push(v);
            }
            sort_ccw(&mut pts);
            cells.push(pts.into_iter().map(|p| index.id(p)).collect());
        }
    }
    Mesh2D::new(index.points, cells)
}

/// Per-iteration diagnostics of Lloyd's method.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LloydTrace {
    /// `Σ_i ∫_{V_i} |x - z_i|²` before each step.
    pub energy: Vec<f64>,
    /// Largest generator displacement of each step.
    pub movement: Vec<f64>,
}

/// Keeps the part of `poly` on the side of `z` of the bisector of `z` and `w`.
fn clip_bisector(poly: &[Point2], z: &Point2, w: &Point2) -> Vec<Point2> {
    let d = w - z;
    let m = (z + w) / 2.0;
    let side = |p: &Point2| (p - m).dot(&d);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            out.push(a + (b - a) * (sa / (sa - sb)));
        }
    }
    out
}

/// Voronoi cells of `gens` clipped to the unit square.
fn voronoi_cells(gens: &[Point2]) -> Vec<Vec<Point2>> {
    let square = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)];
    gens.iter()
        .enumerate()
        .map(|(g, z)| {
            let mut order: Vec<(f64, usize)> =
                gens.iter().enumerate().filter(|&(k, _)| k != g).map(|(k, w)| ((w - z).norm_squared(), k)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cell = square.clone();
            for (d2, k) in order {
                // Bisectors further than twice the cell radius cannot cut it.
                let r2 = cell.iter().map(|p| (p - z).norm_squared()).fold(0.0, f64::max);
                if d2 > 4.0 * r2 {
                    break;
                }
                cell = clip_bisector(&cell, z, &gens[k]);
            }
            cell
        })
        .collect()
}

fn polygon_area_centroid(pts: &[Point2]) -> (f64, Point2) {
    let mut a = 0.0;
    let mut c = Point2::zeros();
    for k in 0..pts.len() {
        let (p, q) = (pts[k], pts[(k + 1) % pts.len()]);
        let w = cross2(&p, &q);
        a += w;
        c += (p + q) * w;
    }
    (a / 2.0, c / (3.0 * a))
}

fn lloyd_energy(gens: &[Point2], cells: &[Vec<Point2>]) -> Result<f64> {
    let mut e = 0.0;
    for (z, cell) in gens.iter().zip(cells) {
        let poly = Polygon2D::new(dedup_cycle(cell))?;
        e += polygon_rule(&poly, 2)?.integrate(|x| (x - z).norm_squared());
    }
    Ok(e)
}

/// Drops consecutive points closer than the merge tolerance.
fn dedup_cycle(pts: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|q| (p - q).norm() > MERGE_TOL) {
            out.push(*p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= MERGE_TOL {
        out.pop();
    }
    out
}

/// Merges vertices within the merge tolerance using a bucket grid.
struct VertexMerger {
    buckets: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point2>,
}

impl VertexMerger {
    const BUCKET: f64 = 1e-8;

    fn new() -> Self {
        Self { buckets: HashMap::new(), points: Vec::new() }
    }

    fn id(&mut self, p: Point2) -> usize {
        let key = ((p.x / Self::BUCKET).floor() as i64, (p.y / Self::BUCKET).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(key.0 + dx, key.1 + dy)) {
                    if let Some(&id) = ids.iter().find(|&&id| (self.points[id] - p).norm() <= MERGE_TOL) {
                        return id;
                    }
                }
            }
        }
        let id = self.points.len();
        // Snap to the square's sides so boundary checks are exact.
        let snap = |v: f64| if v.abs() < MERGE_TOL { 0.0 } else if (v - 1.0).abs() < MERGE_TOL { 1.0 } else { v };
        self.points.push(Point2::new(snap(p.x), snap(p.y)));
        self.buckets.entry(key).or_default().push(id);
        id
    }
}

pub fn gen_cvt(n: usize, iters: usize, seed: u64) -> Result<Mesh2D> {
    gen_cvt_with(n, iters, seed, DEFAULT_JITTER).map(|(m, _)| m)
}

/// Lloyd's method from `N²` generators on a jittered grid; `jitter` is in
/// units of the grid spacing and at most 0.5.
pub fn gen_cvt_with(n: usize, iters: usize, seed: u64, jitter: f64) -> Result<(Mesh2D, LloydTrace)> {
    check_n(n)?;
    if !(0.0..=0.5).contains(&jitter) {
        return Err(Error::InvalidArgument(format!("jitter must lie in [0, 0.5], got {jitter}")));
    }
    let h = 1.0 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens: Vec<Point2> = (0..n * n)
        .map(|k| {
            let (i, j) = ((k % n) as f64, (k / n) as f64);
            let dx = jitter * rng.random_range(-1.0..1.0);
            let dy = jitter * rng.random_range(-1.0..1.0);
            Point2::new((i + 0.5 + dx) * h, (j + 0.5 + dy) * h)
        })
        .collect();
    let mut trace = LloydTrace::default();
    let mut cells = voronoi_cells(&gens);
    for _ in 0..iters {
        trace.energy.push(lloyd_energy(&gens, &cells)?);
        let mut moved = 0.0f64;
        for (z, cell) in gens.iter_mut().zip(&cells) {
            let (_, c) = polygon_area_centroid(cell);
            moved = moved.max((c - *z).norm());
            *z = c;
        }
        trace.movement.push(moved);
        cells = voronoi_cells(&gens);
    }
    trace.energy.push(lloyd_energy(&gens, &cells)?);

    let mut merger = VertexMerger::new();
    let mut ids: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut c: Vec<usize> = Vec::with_capacity(cell.len());
        for p in cell {
            let id = merger.id(*p);
            if c.last() != Some(&id) {
                c.push(id);
            }
        }
        while c.len() > 1 && c.first() == c.last() {
            c.pop();
        }
        ids.push(c);
    }
    let cells = ids.into_iter().map(|c| drop_straight_vertices(&merger.points, c)).collect();
    Ok((Mesh2D::new(merger.points, cells)?, trace))
}

/// Removes vertices where the boundary turns by less than the convexity
/// threshold; clipping can leave such points on the square's sides.
fn drop_straight_vertices(points: &[Point2], mut cell: Vec<usize>) -> Vec<usize> {
    loop {
        let m = cell.len();
        let straight = (0..m).find(|&k| {
            let (a, b, c) = (points[cell[(k + m - 1) % m]], points[cell[k]], points[cell[(k + 1) % m]]);
            cross2(&(b - a), &(c - b)).abs() <= 1e-13 * (b - a).norm() * (c - b).norm()
        });
        match straight {
            Some(k) if m > 3 => {
                cell.remove(k);
            }
            _ => return cell,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(m: &Mesh2D) {
        m.check_unit_square(1e-13).unwrap();
        for e in m.edges() {
            let boundary = e.is_boundary();
            let (a, b) = (m.vertices()[e.from], m.vertices()[e.to]);
            let on_side = |f: fn(&Point2) -> f64| f(&a) == f(&b) && (f(&a) == 0.0 || f(&a) == 1.0);
            let on_square = on_side(|p| p.x) || on_side(|p| p.y);
            assert_eq!(boundary, on_square);
        }
    }

    #[test]
    fn quad_combinatorics() {
        let m = gen_quad(8, 0.3).unwrap();
        assert_eq!(m.num_cells(), 64);
        assert_eq!(m.num_edges(), 144);
        assert_valid(&m);
        let u = gen_quad(4, 0.0).unwrap();
        for p in u.polygons() {
            assert!((p.area() - 1.0 / 16.0).abs() < 1e-15);
        }
        assert!(gen_quad(1, 0.0).is_err());
        assert!(gen_quad(4, 0.6).is_err());
    }

    #[test]
    fn quad_areas_partition() {
        for n in [4, 8, 16, 32] {
            let m = gen_quad(n, 0.3).unwrap();
            assert!((m.total_area() - 1.0).abs() < 1e-13);
            assert_valid(&m);
        }
    }

    #[test]
    fn default_distortion_is_valid_through_64() {
        for n in 2..=64 {
            assert!(gen_quad(n, DEFAULT_DISTORTION).is_ok(), "N = {n}");
        }
        assert!(gen_quad(4, 0.45).is_err());
    }

    #[test]
    fn hexdual_structure() {
        let m = gen_hexdual(8).unwrap();
        assert_eq!(m.num_cells(), 81);
        assert_valid(&m);
        let mut counts = [0usize; 8];
        for p in m.polygons() {
            counts[p.len()] += 1;
        }
        // Interior nodes give hexagons and side nodes pentagons. The corners on
        // the split diagonal touch two triangles (pentagons), the other two
        // touch one (quadrilaterals).
        assert_eq!(counts[6], 49);
        assert_eq!(counts[5], 4 * 7 + 2);
        assert_eq!(counts[4], 2);
        for e in m.edges() {
            assert!(e.is_boundary() || e.cells.iter().all(Option::is_some));
        }
        for n in [4, 16, 32] {
            assert_valid(&gen_hexdual(n).unwrap());
        }
    }

    #[test]
    fn cvt_without_jitter_is_the_square_grid() {
        let (m, _) = gen_cvt_with(4, 0, 0, 0.0).unwrap();
        assert_eq!(m.num_cells(), 16);
        for p in m.polygons() {
            assert_eq!(p.len(), 4);
            assert!((p.area() - 1.0 / 16.0).abs() < 1e-14);
        }
        assert_valid(&m);
    }

    #[test]
    fn cvt_lloyd_descends() {
        let (m, trace) = gen_cvt_with(8, 40, 7, DEFAULT_JITTER).unwrap();
        assert_valid(&m);
        assert_eq!(m.num_cells(), 64);
        for w in trace.energy.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", trace.energy);
        }
        let tail = &trace.movement[5..];
        let rising = tail.windows(2).filter(|w| w[1] > w[0] * 1.05).count();
        assert!(rising <= tail.len() / 10, "{:?}", trace.movement);
        assert!(trace.movement.last().unwrap() < &trace.movement[0]);
    }

    #[test]
    fn cvt_is_seeded() {
        let a = gen_cvt(6, 5, 3).unwrap();
        let b = gen_cvt(6, 5, 3).unwrap();
        let c = gen_cvt(6, 5, 4).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_ne!(a.vertices(), c.vertices());
        for n in [4, 16, 32] {
            assert_valid(&gen_cvt(n, 20, 1).unwrap());
        }
    }

    #[test]
    fn family_parsing() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("tri".parse::<Family>().is_err());
    }
}
