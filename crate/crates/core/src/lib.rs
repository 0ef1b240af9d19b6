//! Unit commitment by multi-block ADMM with an increasing penalty.

pub mod engine;
mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pwq;
pub mod qp;
pub mod subproblems;
pub mod synthetic;
pub mod unit_dp;

pub use engine::{
    run_increasing_rho, run_increasing_rho_observed, AdmmState, SolveResult, SolverConfig,
    TraceRecord, Variant,
};
pub use error::{Result, UcError};
pub use model::*;
pub use pwq::PiecewiseQuadratic;
pub use synthetic::{generate_synthetic, DemandProfile, SyntheticParams};
pub use unit_dp::{solve_1uc, UnitSchedule};
