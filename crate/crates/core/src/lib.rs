//! Exclusive social groups admitting members by unanimous vote in the
//! spatial voting model.
//!
//! Each round two candidates are drawn uniformly from a convex domain (the
//! unit interval, unit square or unit disk). Every current member votes for
//! the nearer candidate, and a candidate is admitted only when the vote is
//! unanimous. A candidate wins exactly when the convex hull of the members
//! lies inside its Voronoi half-plane, which is what the predicates in
//! [`election`] check.
//!
//! Modules:
//! - [`geometry`]: points, half-planes, convex hulls, domains, caps and the
//!   cap shape parameters (segment height, triangular legs).
//! - [`election`]: single-round winner determination, by two independent
//!   characterizations.
//! - [`dynamics`]: the multi-round admission process and seeded ensembles.
//! - [`capprob`]: Monte Carlo estimators for conditional cap-acceptance
//!   probabilities and the bound functions built on them.
//! - [`analysis`]: growth-law fits and held-out model comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod capprob;
pub mod dynamics;
pub mod election;
mod error;
pub mod geometry;
pub mod seed;

pub use error::{Error, Result};
pub use geometry::{Cap, CapShape, ConvexHull, Domain, HalfPlane, Point};
