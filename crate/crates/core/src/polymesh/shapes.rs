//! Built-in polyhedra used by the examples and the verification suite.

use super::polyhedron::{Point3, Polyhedron};
use crate::error::Result;

/// Builds a polyhedron after flipping every loop whose Newell normal points
/// toward the vertex centroid.
pub fn with_outward_loops(vertices: Vec<Point3>, mut loops: Vec<Vec<usize>>) -> Result<Polyhedron> {
    let center = vertices.iter().sum::<Point3>() / vertices.len() as f64;
    for lp in loops.iter_mut() {
        let n = lp.len();
        let mut area_vec = Point3::zeros();
        for k in 0..n {
            area_vec += vertices[lp[k]].cross(&vertices[lp[(k + 1) % n]]);
        }
        if area_vec.dot(&(vertices[lp[0]] - center)) < 0.0 {
            lp.reverse();
        }
    }
    Polyhedron::new(vertices, loops)
}

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

fn build(vertices: Vec<Point3>, loops: Vec<Vec<usize>>) -> Polyhedron {
    with_outward_loops(vertices, loops).expect("built-in shape is valid")
}

/// Tetrahedron with vertices `0, e1, e2, e3`.
pub fn tetrahedron() -> Polyhedron {
    build(
        vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)],
        vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]],
    )
}

/// Box `(0,h1) x (0,h2) x (0,h3)`; vertices numbered bottom then top, each counterclockwise from the origin.
pub fn rectangular_box(h1: f64, h2: f64, h3: f64) -> Polyhedron {
    parallelepiped(p(0.0, 0.0, 0.0), p(h1, 0.0, 0.0), p(0.0, h2, 0.0), p(0.0, 0.0, h3))
}

pub fn unit_cube() -> Polyhedron {
    rectangular_box(1.0, 1.0, 1.0)
}

/// Parallelepiped `origin + s a + t b + u c`, `s, t, u` in `[0, 1]`.
pub fn parallelepiped(origin: Point3, a: Point3, b: Point3, c: Point3) -> Polyhedron {
    let v = vec![
        origin,
        origin + a,
        origin + a + b,
        origin + b,
        origin + c,
        origin + a + c,
        origin + a + b + c,
        origin + b + c,
    ];
    build(
        v,
        vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
        ],
    )
}

/// A parallelepiped sheared in two directions.
pub fn sheared_parallelepiped() -> Polyhedron {
    parallelepiped(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.4, 1.0, 0.0), p(0.3, 0.2, 1.0))
}

/// Pyramid over the unit square with apex `(0.5, 0.5, 1)`.
pub fn square_pyramid() -> Polyhedron {
    build(
        vec![
            p(0.0, 0.0, 0.0),
            p(1.0, 0.0, 0.0),
            p(1.0, 1.0, 0.0),
            p(0.0, 1.0, 0.0),
            p(0.5, 0.5, 1.0),
        ],
        vec![vec![0, 3, 2, 1], vec![0, 1, 4], vec![1, 2, 4], vec![2, 3, 4], vec![3, 0, 4]],
    )
}

/// Prism over the triangle `(0,0), (1,0), (0,1)` for `0 < z < 1`.
pub fn triangular_prism() -> Polyhedron {
    build(
        vec![
            p(0.0, 0.0, 0.0),
            p(1.0, 0.0, 0.0),
            p(0.0, 1.0, 0.0),
            p(0.0, 0.0, 1.0),
            p(1.0, 0.0, 1.0),
            p(0.0, 1.0, 1.0),
        ],
        vec![vec![0, 2, 1], vec![3, 4, 5], vec![0, 1, 4, 3], vec![1, 2, 5, 4], vec![2, 0, 3, 5]],
    )
}

/// Regular octahedron with vertices `-e3, e1, e2, -e1, -e2, e3`.
pub fn octahedron() -> Polyhedron {
    build(
        vec![
            p(0.0, 0.0, -1.0),
            p(1.0, 0.0, 0.0),
            p(0.0, 1.0, 0.0),
            p(-1.0, 0.0, 0.0),
            p(0.0, -1.0, 0.0),
            p(0.0, 0.0, 1.0),
        ],
        vec![
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 1],
            vec![5, 1, 2],
            vec![5, 2, 3],
            vec![5, 3, 4],
            vec![5, 4, 1],
        ],
    )
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] =
    ["tetrahedron", "cube", "pyramid", "prism", "octahedron", "parallelepiped", "box"];

pub fn by_name(name: &str) -> Option<Polyhedron> {
    Some(match name {
        "tetrahedron" | "tet" => tetrahedron(),
        "cube" => unit_cube(),
        "pyramid" => square_pyramid(),
        "prism" => triangular_prism(),
        "octahedron" => octahedron(),
        "parallelepiped" => sheared_parallelepiped(),
        "box" => rectangular_box(2.0, 1.0, 0.5),
        _ => return None,
    })
}

/// Every built-in shape with its name.
pub fn corpus() -> Vec<(&'static str, Polyhedron)> {
    NAMES.iter().map(|&n| (n, by_name(n).unwrap())).collect()
}
