//! End-to-end runs: maximal estimates, sweeps over `R`, the packing check and
//! the command line front end.

pub mod cli;
pub mod maximal;
pub mod output;
pub mod packing;
pub mod sweep;

pub use maximal::{maximal_lower_bound, maximal_lower_bound_at, MaximalEstimate};
pub use packing::{packing_check, PackingConclusion, PackingReport};
pub use sweep::{r_sweep, r_sweep_with, ScalingReport, SweepOptions, SweepRow};
pub use cli::{run_cli, RunConfig};
