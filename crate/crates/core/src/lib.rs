//! Minimal-degree H(div) and H(curl) finite elements on convex polygons and
//! polyhedra, built from Wachspress coordinates and Whitney forms.

pub mod elem2d;
pub mod elem3d;
pub mod error;
pub mod gbc;
pub mod linalg;
pub mod meshgen;
pub mod mixedfem;
pub mod polymesh;
pub mod quadrature;
pub mod sampling;
pub mod tolerances;
pub mod whitney;

pub use error::{Error, Result};
