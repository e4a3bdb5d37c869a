//! `polyfe` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polyfe::elem2d::{build_basis2d, duality_residual, HdivBasis2D};
use polyfe::elem3d::{verify_duality, verify_polyhedron, Element3D, VerifyTolerances};
use polyfe::gbc::{eval2d, eval3d};
use polyfe::meshgen::{Family, MeshSpec, DEFAULT_DISTORTION, DEFAULT_JITTER, DEFAULT_LLOYD_ITERS};
use polyfe::mixedfem::{convergence_study, Problem};
use polyfe::polymesh::format::{self, PolyMesh};
use polyfe::polymesh::{shapes, Point2, Point3, Polygon2D, Polyhedron};
use polyfe::tolerances;

#[derive(Parser, Debug)]
#[command(name = "polyfe", version, about = "Minimal-degree H(div)/H(curl) elements on polygons and polyhedra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a unit-square mesh as POLYMESH 2.
    Meshgen(MeshgenArgs),
    /// Evaluate Wachspress coordinates and gradients at points of one cell.
    GbcEval(GbcArgs),
    /// Coefficients of the H(div) basis on one polygon.
    Basis2d(Basis2dArgs),
    /// Coefficients of the H(div) and H(curl) bases on one polyhedron.
    Basis3d(Basis3dArgs),
    /// Run the polyhedral verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Mixed-method convergence study on a mesh family.
    Convergence(ConvergenceArgs),
    /// Sample the H(div) basis of one polygon on an interior grid.
    BasisDump(BasisDumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Quad,
    Hexdual,
    Cvt,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Quad => Family::Quad,
            FamilyArg::Hexdual => Family::Hexdual,
            FamilyArg::Cvt => Family::Cvt,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Smooth,
    Rough,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Smooth => Problem::Smooth,
            ProblemArg::Rough => Problem::Rough,
        }
    }
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Interior vertex displacement of the quad family, in units of 1/N.
    #[arg(long, default_value_t = DEFAULT_DISTORTION)]
    distortion: f64,
    /// Lloyd iterations of the cvt family.
    #[arg(long, default_value_t = DEFAULT_LLOYD_ITERS)]
    iters: usize,
    /// Seed of the cvt family.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial seed jitter of the cvt family, in units of 1/N.
    #[arg(long, default_value_t = DEFAULT_JITTER)]
    jitter: f64,
}

impl FamilyArgs {
    fn spec(&self, n: usize) -> MeshSpec {
        MeshSpec {
            distortion: self.distortion,
            iters: self.iters,
            seed: self.seed,
            jitter: self.jitter,
            ..MeshSpec::new(self.family.into(), n)
        }
    }
}

#[derive(Args, Debug)]
struct MeshgenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Resolution N (N x N squares, hexagon rows or generators).
    #[arg(long, short)]
    n: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// One polygon: a built-in shape, a vertex list or a cell of a POLYMESH 2 file.
#[derive(Args, Debug)]
struct CellArgs {
    /// triangle, square, pentagon or hexagon.
    #[arg(long, conflicts_with_all = ["polygon", "input"])]
    shape: Option<String>,
    /// Counterclockwise vertices, e.g. "0,0 1,0 0,1".
    #[arg(long, conflicts_with = "input")]
    polygon: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    cell: usize,
}

/// One polyhedron: a built-in shape or a cell of a POLYMESH 3 file.
#[derive(Args, Debug)]
struct SolidArgs {
    /// tetrahedron, cube, pyramid, prism, octahedron, parallelepiped or box.
    #[arg(long, conflicts_with = "input")]
    shape: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    cell: usize,
}

#[derive(Args, Debug)]
struct GbcArgs {
    /// Evaluate on a polyhedron instead of a polygon.
    #[arg(long)]
    solid: bool,
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    polygon: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    cell: usize,
    /// Evaluation point "x,y" or "x,y,z"; repeatable.
    #[arg(long = "point", required = true)]
    points: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Basis2dArgs {
    #[command(flatten)]
    cell: CellArgs,
    /// Reference point "x,y"; defaults to the centroid.
    #[arg(long)]
    x_star: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Basis3dArgs {
    #[command(flatten)]
    solid: SolidArgs,
    /// Reference point "x,y,z"; defaults to the vertex centroid.
    #[arg(long)]
    x_star: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    solid: SolidArgs,
    /// Verify every built-in shape.
    #[arg(long, conflicts_with_all = ["shape", "input"])]
    all: bool,
    /// Center used for the Type II test, "x,y,z"; defaults to the vertex centroid.
    #[arg(long)]
    center: Option<String>,
    #[arg(long, default_value_t = tolerances::DUALITY_3D)]
    duality_tol: f64,
    #[arg(long, default_value_t = tolerances::SPACE_FIT)]
    fit_tol: f64,
    #[arg(long, default_value_t = tolerances::P1_MINUS_INCLUSION)]
    inclusion_tol: f64,
    #[arg(long, default_value_t = tolerances::TANGENTIAL_TRACE)]
    trace_tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Increasing resolutions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    levels: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ProblemArg::Smooth)]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BasisDumpArgs {
    #[command(flatten)]
    cell: CellArgs,
    /// Samples per direction of the bounding-box grid; exterior points are dropped.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<polyfe::Error> for Failure {
    fn from(e: polyfe::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Meshgen(a) => cmd_meshgen(a),
        Command::GbcEval(a) => cmd_gbc_eval(a),
        Command::Basis2d(a) => cmd_basis2d(a),
        Command::Basis3d(a) => cmd_basis3d(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::BasisDump(a) => cmd_basis_dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn parse_coords(s: &str, dim: usize) -> CliResult<Vec<f64>> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Input(format!("invalid number `{t}` in `{s}`"))))
        .collect::<CliResult<_>>()?;
    if xs.len() != dim {
        return Err(Failure::Input(format!("expected {dim} coordinates in `{s}`")));
    }
    Ok(xs)
}

fn parse_point2(s: &str) -> CliResult<Point2> {
    let x = parse_coords(s, 2)?;
    Ok(Point2::new(x[0], x[1]))
}

fn parse_point3(s: &str) -> CliResult<Point3> {
    let x = parse_coords(s, 3)?;
    Ok(Point3::new(x[0], x[1], x[2]))
}

fn regular_polygon(n: usize) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + std::f64::consts::FRAC_PI_2;
            Point2::new(t.cos(), t.sin())
        })
        .collect()
}

fn builtin_polygon(name: &str) -> CliResult<Polygon2D> {
    let v = match name {
        "triangle" => vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        "square" => vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
        "pentagon" => regular_polygon(5),
        "hexagon" => regular_polygon(6),
        _ => return Err(Failure::Input(format!("unknown polygon `{name}` (triangle, square, pentagon, hexagon)"))),
    };
    Ok(Polygon2D::new(v)?)
}

fn resolve_polygon(shape: &Option<String>, polygon: &Option<String>, input: &Option<PathBuf>, cell: usize) -> CliResult<Polygon2D> {
    if let Some(name) = shape {
        return builtin_polygon(name);
    }
    if let Some(list) = polygon {
        let v = list.split_whitespace().map(parse_point2).collect::<CliResult<Vec<_>>>()?;
        return Ok(Polygon2D::new(v)?);
    }
    let Some(path) = input else {
        return Err(Failure::Input("one of --shape, --polygon or --input is required".into()));
    };
    match format::read(path)? {
        PolyMesh::Planar(mesh) => mesh
            .polygons()
            .get(cell)
            .cloned()
            .ok_or_else(|| Failure::Input(format!("cell {cell} out of range (mesh has {})", mesh.num_cells()))),
        PolyMesh::Solid(_) => Err(Failure::Input(format!("{} is a POLYMESH 3 file; expected a polygon", path.display()))),
    }
}

fn resolve_polyhedron(shape: &Option<String>, input: &Option<PathBuf>, cell: usize) -> CliResult<(String, Polyhedron)> {
    if let Some(name) = shape {
        let poly = shapes::by_name(name)
            .ok_or_else(|| Failure::Input(format!("unknown shape `{name}` ({})", shapes::NAMES.join(", "))))?;
        return Ok((name.clone(), poly));
    }
    let Some(path) = input else {
        return Err(Failure::Input("one of --shape or --input is required".into()));
    };
    match format::read(path)? {
        PolyMesh::Solid(cells) => {
            let count = cells.len();
            let poly = cells
                .into_iter()
                .nth(cell)
                .ok_or_else(|| Failure::Input(format!("cell {cell} out of range (file has {count})")))?;
            Ok((format!("{}#{cell}", path.display()), poly))
        }
        PolyMesh::Planar(_) => Err(Failure::Input(format!("{} is a POLYMESH 2 file; expected a polyhedron", path.display()))),
    }
}

fn cmd_meshgen(a: MeshgenArgs) -> CliResult<()> {
    let mesh = a.family.spec(a.n).generate()?;
    let stats = mesh.shape_stats();
    eprintln!(
        "{} cells, {} edges, h = {:.4e}, min area ratio {:.3}, min edge ratio {:.3}",
        mesh.num_cells(),
        mesh.num_edges(),
        mesh.max_diameter(),
        stats.min_area_ratio,
        stats.min_edge_ratio
    );
    emit(&a.output, &format::write_mesh2d(&mesh))
}

#[derive(Serialize)]
struct GbcRow {
    point: Vec<f64>,
    values: Vec<f64>,
    gradients: Vec<Vec<f64>>,
}

fn cmd_gbc_eval(a: GbcArgs) -> CliResult<()> {
    let rows: Vec<GbcRow> = if a.solid {
        if a.polygon.is_some() {
            return Err(Failure::Input("--polygon describes a 2D cell; drop --solid".into()));
        }
        let (_, poly) = resolve_polyhedron(&a.shape, &a.input, a.cell)?;
        a.points
            .iter()
            .map(|s| {
                let e = eval3d(&poly, &parse_point3(s)?)?;
                Ok(GbcRow {
                    point: e.point.iter().copied().collect(),
                    values: e.values,
                    gradients: e.gradients.iter().map(|g| g.iter().copied().collect()).collect(),
                })
            })
            .collect::<CliResult<_>>()?
    } else {
        let poly = resolve_polygon(&a.shape, &a.polygon, &a.input, a.cell)?;
        a.points
            .iter()
            .map(|s| {
                let e = eval2d(&poly, &parse_point2(s)?)?;
                Ok(GbcRow {
                    point: e.point.iter().copied().collect(),
                    values: e.values,
                    gradients: e.gradients.iter().map(|g| g.iter().copied().collect()).collect(),
                })
            })
            .collect::<CliResult<_>>()?
    };
    let text = match a.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let dim = rows.first().map_or(2, |r| r.point.len());
            let axes = &["x", "y", "z"][..dim];
            let mut s = format!(
                "point,vertex,{},lambda,{}\n",
                axes.join(","),
                axes.iter().map(|x| format!("d{x}")).collect::<Vec<_>>().join(",")
            );
            for (p, r) in rows.iter().enumerate() {
                for (i, (v, g)) in r.values.iter().zip(&r.gradients).enumerate() {
                    let _ = writeln!(s, "{p},{i},{},{v:.17e},{}", join(&r.point), join(g));
                }
            }
            s
        }
    };
    emit(&a.output, &text)
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct Basis2dReport {
    vertices: Vec<[f64; 2]>,
    x_star: [f64; 2],
    /// Multiplier of `x - x_*` in each `q_i`.
    c0: Vec<f64>,
    /// Row `i`: coefficients of `χ∇λ_k` in `q_i`.
    coeffs: Vec<Vec<f64>>,
    divergence: Vec<f64>,
    duality_residual: f64,
}

fn basis2d_report(basis: &HdivBasis2D) -> CliResult<Basis2dReport> {
    let n = basis.len();
    Ok(Basis2dReport {
        vertices: basis.polygon().vertices().iter().map(|v| [v.x, v.y]).collect(),
        x_star: [basis.x_star().x, basis.x_star().y],
        c0: (0..n).map(|i| basis.c0(i)).collect(),
        coeffs: (0..n).map(|i| basis.coeffs(i).to_vec()).collect(),
        divergence: (0..n).map(|i| basis.divergence(i)).collect(),
        duality_residual: duality_residual(basis, 8)?,
    })
}

fn cmd_basis2d(a: Basis2dArgs) -> CliResult<()> {
    let poly = resolve_polygon(&a.cell.shape, &a.cell.polygon, &a.cell.input, a.cell.cell)?;
    let x_star = a.x_star.as_deref().map(parse_point2).transpose()?;
    let report = basis2d_report(&build_basis2d(&poly, x_star)?)?;
    let text = match a.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let n = report.c0.len();
            let mut s = format!(
                "i,c0,divergence,{}\n",
                (0..n).map(|k| format!("c_{k}")).collect::<Vec<_>>().join(",")
            );
            for i in 0..n {
                let _ = writeln!(s, "{i},{:.17e},{:.17e},{}", report.c0[i], report.divergence[i], join(&report.coeffs[i]));
            }
            s
        }
    };
    emit(&a.output, &text)
}

#[derive(Serialize)]
struct Basis3dReport {
    name: String,
    dims: [usize; 3],
    x_star: [f64; 3],
    /// `q_f = c0_f (x - x_*) + Σ coeffs[f][g] W̃_g`.
    face_c0: Vec<f64>,
    face_coeffs: Vec<Vec<f64>>,
    /// `p_e = Σ vertex_coeffs[e][v] ∇λ_v + Σ edge_face_coeffs[e][f] W̃_f`.
    edge_vertex_coeffs: Vec<Vec<f64>>,
    edge_face_coeffs: Vec<Vec<f64>>,
    inverse_condition_face_system: f64,
    inverse_condition_edge_system: f64,
    face_duality: f64,
    edge_duality: f64,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn cmd_basis3d(a: Basis3dArgs) -> CliResult<()> {
    let (name, poly) = resolve_polyhedron(&a.solid.shape, &a.solid.input, a.solid.cell)?;
    let x_star = a.x_star.as_deref().map(parse_point3).transpose()?;
    let forms = polyfe::whitney::WhitneyForms::new(&poly)?;
    let el = Element3D::from_forms(forms, x_star)?;
    let d = verify_duality(&el)?;
    let xs = el.hdiv.x_star();
    let report = Basis3dReport {
        name,
        dims: [poly.num_vertices(), poly.num_edges(), poly.num_faces()],
        x_star: [xs.x, xs.y, xs.z],
        face_c0: (0..poly.num_faces()).map(|f| el.hdiv.c0(f)).collect(),
        face_coeffs: rows(el.hdiv.coeffs()),
        edge_vertex_coeffs: rows(el.hcurl.vertex_coeffs()),
        edge_face_coeffs: rows(el.hcurl.face_coeffs()),
        inverse_condition_face_system: el.hdiv.inverse_condition(),
        inverse_condition_edge_system: el.hcurl.inverse_condition(),
        face_duality: d.face,
        edge_duality: d.edge,
    };
    let text = match a.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("kind,index,c0,coefficients\n");
            for (f, row) in report.face_coeffs.iter().enumerate() {
                let _ = writeln!(s, "face,{f},{:.17e},{}", report.face_c0[f], join(row));
            }
            for (e, (va, fb)) in report.edge_vertex_coeffs.iter().zip(&report.edge_face_coeffs).enumerate() {
                let _ = writeln!(s, "edge,{e},,{},{}", join(va), join(fb));
            }
            s
        }
    };
    emit(&a.output, &text)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    tolerances: VerifyTolerances,
    reports: &'a [polyfe::elem3d::VerificationReport],
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let center = a.center.as_deref().map(parse_point3).transpose()?;
    let targets: Vec<(String, Polyhedron)> = if a.all {
        shapes::corpus().into_iter().map(|(n, p)| (n.to_string(), p)).collect()
    } else {
        vec![resolve_polyhedron(&a.solid.shape, &a.solid.input, a.solid.cell)?]
    };
    let tol = VerifyTolerances {
        duality: a.duality_tol,
        space_fit: a.fit_tol,
        inclusion: a.inclusion_tol,
        tangential_trace: a.trace_tol,
        ..VerifyTolerances::default()
    };
    let reports = targets
        .iter()
        .map(|(name, poly)| verify_polyhedron(name, poly, center))
        .collect::<polyfe::Result<Vec<_>>>()?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed_with(&tol)).map(|r| r.name.as_str()).collect();
    emit(&a.output, &json(&VerifyOutput { passed: failed.is_empty(), tolerances: tol, reports: &reports })?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}

fn cmd_convergence(a: ConvergenceArgs) -> CliResult<()> {
    let report = convergence_study(&a.family.spec(a.levels.first().copied().unwrap_or(1)), &a.levels, a.problem.into())?;
    let text = match a.format {
        Format::Csv => report.to_csv(),
        Format::Json => json(&report)?,
    };
    emit(&a.output, &text)
}

#[derive(Serialize)]
struct DumpSample {
    basis: usize,
    x: f64,
    y: f64,
    qx: f64,
    qy: f64,
}

#[derive(Serialize)]
struct DumpOutput {
    coefficients: Basis2dReport,
    samples: Vec<DumpSample>,
}

fn dump_grid(poly: &Polygon2D, n: usize) -> Vec<Point2> {
    let lo = poly.vertices().iter().fold(Point2::repeat(f64::INFINITY), |a, v| a.inf(v));
    let hi = poly.vertices().iter().fold(Point2::repeat(f64::NEG_INFINITY), |a, v| a.sup(v));
    let mut pts = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let t = Point2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let x = lo + (hi - lo).component_mul(&t);
            if poly.contains_interior(&x) {
                pts.push(x);
            }
        }
    }
    pts
}

fn cmd_basis_dump(a: BasisDumpArgs) -> CliResult<()> {
    if a.grid == 0 {
        return Err(Failure::Input("--grid must be positive".into()));
    }
    let poly = resolve_polygon(&a.cell.shape, &a.cell.polygon, &a.cell.input, a.cell.cell)?;
    let basis = build_basis2d(&poly, None)?;
    let mut samples = Vec::new();
    for i in 0..basis.len() {
        for x in dump_grid(&poly, a.grid) {
            let q = basis.eval(i, &x)?;
            samples.push(DumpSample { basis: i, x: x.x, y: x.y, qx: q.x, qy: q.y });
        }
    }
    let text = match a.format {
        Format::Json => json(&DumpOutput { coefficients: basis2d_report(&basis)?, samples })?,
        Format::Csv => {
            let mut s = String::from("basis,x,y,qx,qy\n");
            for p in &samples {
                let _ = writeln!(s, "{},{:.17e},{:.17e},{:.17e},{:.17e}", p.basis, p.x, p.y, p.qx, p.qy);
            }
            s
        }
    };
    emit(&a.output, &text)
}
