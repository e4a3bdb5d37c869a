//! Tolerances shared by the geometry checks, the verification routines and the
//! acceptance tests. Values are relative to the cell diameter `h` unless noted.

/// Quad faces must satisfy `|v1 - v2 + v3 - v4| <= PARALLELOGRAM * h`.
pub const PARALLELOGRAM: f64 = 1e-12;

/// Maximum distance of a face vertex to the face plane, relative to `h`.
pub const FACE_PLANARITY: f64 = 1e-10;

/// Minimum turning cross product between consecutive polygon edges, relative to `h^2`.
pub const STRICT_CONVEXITY: f64 = 1e-14;

/// A point closer than this (relative to `h`) to the boundary is not interior.
pub const INTERIOR_MARGIN: f64 = 1e-14;

/// Inward offset used to evaluate traces on edges and faces, relative to `h`.
pub const TRACE_OFFSET: f64 = 1e-7;

/// Relative threshold below which a singular value counts as zero.
pub const RANK: f64 = 1e-10;

/// Type II center condition, relative to `h^2`.
pub const TYPE_II_CENTER: f64 = 1e-10;

/// Exact reconstruction of interior segments from incident edges, relative to `|tau|`.
pub const INTERIOR_COMBINATION: f64 = 1e-12;

/// Edge/face delta-duality of the 3D bases under offset sampling.
pub const DUALITY_3D: f64 = 1e-4;

/// Least-squares fit residual for space inclusions such as grad M0 in M1.
pub const SPACE_FIT: f64 = 1e-6;

/// P1-minus inclusion residual on Type I/II cells.
pub const P1_MINUS_INCLUSION: f64 = 1e-4;

/// Tangential trace agreement of `p_e` with `|e| W~_e` on faces.
pub const TANGENTIAL_TRACE: f64 = 1e-4;

/// Delta-duality of the 2D basis under offset sampling.
pub const DUALITY_2D: f64 = 1e-6;
