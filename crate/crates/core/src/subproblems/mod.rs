//! Continuous blocks of the decomposition: renewables, storage and the
//! per-step transmission problem.

mod renewable;
mod storage;
mod transmission;

pub use renewable::res_update;
pub use storage::{storage_dispatch, storage_objective, StorageDispatch};
pub use transmission::{
    flow_update, injection_update, solve_transmission_step, transmission_objective,
    TransmissionStepProblem, TransmissionStepResult,
};
