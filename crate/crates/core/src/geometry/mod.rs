//! Planar primitives for the three domains.
//!
//! Tolerances: geometric predicates (membership, feasibility, chord
//! endpoints) use [`GEOM_EPS`]; algebraic identities and the hull/half-plane
//! containment test use [`ALG_EPS`]. All domains have unit scale.
//!
//! The unit interval is embedded as the segment `y = 0, 0 <= x <= 1`, so one
//! set of planar predicates serves every domain.

mod cap;
mod domain;
mod halfplane;
mod hull;
mod point;
mod region;
mod square;

pub use cap::{disk_segment_area, disk_segment_height, make_cap, Cap, CapSampler, CapShape};
pub use domain::Domain;
pub use halfplane::{bisector, HalfPlane};
pub use hull::{hull_in_halfplane, hull_insert, ConvexHull};
pub use point::Point;
pub use region::{clip_polygon, polygon_area, region_support, region_support_point};
pub use square::{square_cap_sides, square_cap_triangle, Dihedral, SquareTriangle};

/// Tolerance for geometric predicates.
pub const GEOM_EPS: f64 = 1e-9;

/// Tolerance for algebraic identities.
pub const ALG_EPS: f64 = 1e-12;
