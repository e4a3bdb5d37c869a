//! The POLYMESH text format.
//!
//! ```text
//! POLYMESH 2            | POLYMESH 3
//! VERTICES <n>          | VERTICES <n>
//! <x> <y>    (n lines)  | <x> <y> <z>   (n lines)
//! CELLS <m>             | CELLS <m>
//! <k> <i_1> .. <i_k>    | CELL <nf>              (per cell)
//!            (m lines)  | <k> <i_1> .. <i_k>     (nf face lines)
//! ```
//!
//! Indices are 0-based. `#` starts a comment; blank lines are ignored.
//! 2D cell loops are counterclockwise; 3D face loops are counterclockwise
//! seen from outside the cell.

use std::fmt::Write as _;

use super::mesh2d::Mesh2D;
use super::polygon::Point2;
use super::polyhedron::{Point3, Polyhedron};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum PolyMesh {
    Planar(Mesh2D),
    /// Cells of a 3D mesh. Each cell's vertices are the referenced global
    /// vertices in increasing global order.
    Solid(Vec<Polyhedron>),
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-empty line with comments stripped, as tokens.
    fn next_tokens(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            self.last = i + 1;
            if !toks.is_empty() {
                return Ok((i + 1, toks));
            }
        }
        Err(Error::Parse { line: self.last + 1, message: format!("unexpected end of input, expected {what}") })
    }

    fn trailing(&mut self) -> Result<()> {
        match self.next_tokens("") {
            Ok((line, _)) => Err(Error::Parse { line, message: "unexpected trailing content".into() }),
            Err(_) => Ok(()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn keyword_count(lines: &mut Lines, key: &str) -> Result<usize> {
    let (line, toks) = lines.next_tokens(key)?;
    if toks.len() != 2 || toks[0] != key {
        return Err(parse_err(line, format!("expected `{key} <count>`")));
    }
    toks[1].parse().map_err(|_| parse_err(line, format!("invalid count `{}`", toks[1])))
}

fn index_loop(line: usize, toks: &[&str], nv: usize) -> Result<Vec<usize>> {
    let k: usize = toks[0].parse().map_err(|_| parse_err(line, format!("invalid loop length `{}`", toks[0])))?;
    if toks.len() != k + 1 {
        return Err(parse_err(line, format!("loop declares {k} indices but lists {}", toks.len() - 1)));
    }
    toks[1..]
        .iter()
        .map(|t| {
            let i: usize = t.parse().map_err(|_| parse_err(line, format!("invalid vertex index `{t}`")))?;
            if i >= nv {
                return Err(parse_err(line, format!("vertex index {i} out of range (have {nv})")));
            }
            Ok(i)
        })
        .collect()
}

pub fn parse(text: &str) -> Result<PolyMesh> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.next_tokens("header")?;
    if toks.len() != 2 || toks[0] != "POLYMESH" {
        return Err(parse_err(line, "expected header `POLYMESH 2` or `POLYMESH 3`"));
    }
    let dim = match toks[1] {
        "2" => 2,
        "3" => 3,
        other => return Err(parse_err(line, format!("unsupported dimension `{other}`"))),
    };
    let nv = keyword_count(&mut lines, "VERTICES")?;
    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, toks) = lines.next_tokens("vertex coordinates")?;
        if toks.len() != dim {
            return Err(parse_err(line, format!("expected {dim} coordinates, got {}", toks.len())));
        }
        let xs: Vec<f64> = toks
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(line, format!("invalid coordinate `{t}`"))))
            .collect::<Result<_>>()?;
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(line, "non-finite coordinate"));
        }
        coords.push((line, xs));
    }
    let nc = keyword_count(&mut lines, "CELLS")?;
    if dim == 2 {
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (line, toks) = lines.next_tokens("cell loop")?;
            cells.push(index_loop(line, &toks, nv)?);
        }
        lines.trailing()?;
        let verts = coords.iter().map(|(_, x)| Point2::new(x[0], x[1])).collect();
        return Ok(PolyMesh::Planar(Mesh2D::new(verts, cells)?));
    }

    let verts: Vec<Point3> = coords.iter().map(|(_, x)| Point3::new(x[0], x[1], x[2])).collect();
    let mut cells = Vec::with_capacity(nc);
    for c in 0..nc {
        let (line, toks) = lines.next_tokens("`CELL <faces>`")?;
        if toks.len() != 2 || toks[0] != "CELL" {
            return Err(parse_err(line, "expected `CELL <face count>`"));
        }
        let nf: usize = toks[1].parse().map_err(|_| parse_err(line, format!("invalid face count `{}`", toks[1])))?;
        let mut loops = Vec::with_capacity(nf);
        for _ in 0..nf {
            let (line, toks) = lines.next_tokens("face loop")?;
            loops.push(index_loop(line, &toks, nv)?);
        }
        let mut used: Vec<usize> = loops.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let local: Vec<Vec<usize>> = loops
            .iter()
            .map(|lp| lp.iter().map(|g| used.binary_search(g).unwrap()).collect())
            .collect();
        let pts = used.iter().map(|&g| verts[g]).collect();
        let poly = Polyhedron::new(pts, local).map_err(|e| parse_err(line, format!("cell {c}: {e}")))?;
        cells.push(poly);
    }
    lines.trailing()?;
    Ok(PolyMesh::Solid(cells))
}

pub fn read(path: &std::path::Path) -> Result<PolyMesh> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write_mesh2d(mesh: &Mesh2D) -> String {
    let mut s = String::from("POLYMESH 2\n");
    let _ = writeln!(s, "VERTICES {}", mesh.vertices().len());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{:.17e} {:.17e}", v.x, v.y);
    }
    let _ = writeln!(s, "CELLS {}", mesh.num_cells());
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.len());
        for i in c {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

/// Writes one polyhedron as a single-cell POLYMESH 3 file.
pub fn write_polyhedron(poly: &Polyhedron) -> String {
    let mut s = String::from("POLYMESH 3\n");
    let _ = writeln!(s, "VERTICES {}", poly.num_vertices());
    for v in poly.vertices() {
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
    }
    let _ = writeln!(s, "CELLS 1\nCELL {}", poly.num_faces());
    for f in poly.faces() {
        let _ = write!(s, "{}", f.len());
        for i in &f.vertices {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymesh::shapes;

    #[test]
    fn roundtrip_polyhedron() {
        let o = shapes::octahedron();
        let PolyMesh::Solid(cells) = parse(&write_polyhedron(&o)).unwrap() else { panic!() };
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].num_edges(), 12);
        assert_eq!(cells[0].vertices(), o.vertices());
    }

    #[test]
    fn parses_comments_and_2d() {
        let text = "# unit square\nPOLYMESH 2\nVERTICES 4\n0 0\n1 0 # corner\n1 1\n0 1\n\nCELLS 1\n4 0 1 2 3\n";
        let PolyMesh::Planar(m) = parse(text).unwrap() else { panic!() };
        assert_eq!(m.num_edges(), 4);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "POLYMESH 2\nVERTICES 3\n0 0\n1 zero\n0 1\nCELLS 1\n3 0 1 2\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let text = "POLYMESH 2\nVERTICES 3\n0 0\n1 0\n0 1\nCELLS 1\n3 0 1 9\n";
        assert!(matches!(parse(text), Err(Error::Parse { line: 7, .. })));
        assert!(matches!(parse("POLYMESH 4\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("POLYMESH 2\nVERTICES 1\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn rejects_non_parallelogram_face_with_line() {
        let text = "POLYMESH 3\nVERTICES 5\n0 0 0\n2 0 0\n1 1 0\n0 1 0\n0.5 0.5 1\nCELLS 1\nCELL 5\n4 0 3 2 1\n3 0 1 4\n3 1 2 4\n3 2 3 4\n3 3 0 4\n";
        match parse(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 9);
                assert!(message.contains("parallelogram"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }
}
