//! Convex polygons, 2D meshes, convex polyhedra and their incidence algebra.

pub mod adjacency;
pub mod format;
pub mod mesh2d;
pub mod polygon;
pub mod polyhedron;
pub mod shapes;

pub use adjacency::{build_adjacency, AdjacencyMatrices, AdjacencyReport};
pub use mesh2d::{Mesh2D, MeshEdge, ShapeStats};
pub use polygon::{cross2, Point2, Polygon2D};
pub use polyhedron::{Edge, Face, FaceShape, Point3, Polyhedron, SegmentClass};
