//! The outer solver: multi-block sweeps, multiplier updates and the
//! increasing-penalty loop.

mod config;
mod run;
mod state;
mod sweep;

pub use config::{SolverConfig, Variant};
pub use run::{run_increasing_rho, run_increasing_rho_observed, SolveResult, TraceRecord};
pub use state::{init_state, AdmmState};
pub use sweep::{exchange_iteration, gauss_seidel_iteration, update_multipliers};
