//! Golf strategy optimisation.
//!
//! Shot traces are turned into per-surface shot patterns ([`skills`]),
//! played on rasterised holes ([`course`], [`simulator`]), assembled into a
//! stochastic shortest path model ([`builder`]) and solved exactly
//! ([`ssp`]). [`metrics`] plays rounds under a solved policy and
//! [`synthgen`] produces ground-truth players and holes.
//!
//! Lengths are in inches throughout.

pub mod builder;
pub mod course;
pub mod geometry;
pub mod metrics;
pub mod seeding;
pub mod simulator;
pub mod skills;
pub mod ssp;
pub mod synthgen;

pub use builder::{build_instance, Booklet, BuiltHole, Discretization, LadderSampler};
pub use course::{validate_hole, HoleRaster, SurfaceCode};
pub use geometry::{bresenham_cells, CanonicalFrame, CellCoord, Point2};
pub use simulator::{simulate_shot, ShotEvent, ShotOutcome};
pub use ssp::{evaluate_policy, value_iteration, Policy, SspInstance};
