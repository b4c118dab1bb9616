//! File formats, placement, reporting and instance generation around the
//! core solvers. The `platepack` binary wires these into subcommands.

pub mod formats;
pub mod generator;
pub mod placement;
pub mod report;
