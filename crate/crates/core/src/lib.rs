//! Optimization toolkit for loading grouped samples onto 96-well plates.
//!
//! A plate is split into six strips of 16 wells; every well in a strip is
//! processed at one temperature and adjacent strips may differ by at most
//! 5 °C. Each group of samples runs at a fixed temperature and needs one
//! isolated reagent well on every plate where it has samples. The goal is
//! to use as few plates (and then as few wells) as possible.
//!
//! Module map:
//! - [`model`]: domain types, feasibility validation, cost metrics.
//! - [`constructive`]: temperature-sorted first-fit initial solution.
//! - [`neighborhood`]: grouping and strip-exchange moves.
//! - [`annealing`]: simulated-annealing driver with lexicographic cost.
//! - [`ilp`]: integer-linear-programming model builder and LP writer.
//! - [`exact`]: exhaustive optimum for tiny instances, used as test oracle.

pub mod annealing;
pub mod constructive;
pub mod exact;
pub mod ilp;
pub mod model;
pub mod neighborhood;

pub use model::{
    Celsius, CostVector, Group, Instance, ObjectiveWeights, PlateAssignment, PlateGeometry,
    Solution, StripAssignment,
};
