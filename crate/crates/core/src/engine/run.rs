use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    exchange_iteration, gauss_seidel_iteration, init_state, AdmmState, SolverConfig, Variant,
};
use crate::model::{evaluate_objective, Schedule, UcInstance};
use crate::Result;

/// One row of the convergence trace, written after every sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// Penalty used during the sweep.
    pub rho: f64,
    pub rd_l1: f64,
    pub rd_linf: f64,
    /// True objective plus `Σ λ·RD + ρ/2 Σ RD²`, with the sweep's `λ`.
    pub aug_obj: f64,
    pub true_obj: f64,
    pub ms: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub schedule: Schedule,
    pub objective: f64,
    pub rd_l1: f64,
    pub rd_linf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
    /// Penalty after the last completed block.
    pub final_rho: f64,
    pub epsilon: f64,
    /// Inner transmission solves that hit their iteration cap.
    pub inner_capped: usize,
}

/// Runs blocks of `m` sweeps, growing `ρ` by `α` after each block, until
/// `Σ|RD| ≤ ε` at a block boundary or `max_iters` sweeps have run.
pub fn run_increasing_rho(inst: &UcInstance, config: &SolverConfig) -> Result<SolveResult> {
    run_increasing_rho_observed(inst, config, |_, _| {})
}

/// As [`run_increasing_rho`], calling `observe` after every sweep.
pub fn run_increasing_rho_observed(
    inst: &UcInstance,
    config: &SolverConfig,
    mut observe: impl FnMut(&UcInstance, &AdmmState),
) -> Result<SolveResult> {
    let mut state = init_state(inst, config)?;
    let epsilon = config.epsilon_for(inst);
    let start = Instant::now();
    let mut trace = Vec::new();
    let mut converged = false;

    while state.k < config.max_iters {
        let rho = state.rho;
        let lambda = state.lambda.clone();
        match config.variant {
            Variant::GaussSeidel => gauss_seidel_iteration(&mut state, inst)?,
            Variant::Exchange => exchange_iteration(&mut state, inst)?,
        }
        observe(inst, &state);

        let l1 = state.rd_l1();
        if config.trace {
            let true_obj = evaluate_objective(inst, &state.schedule)?;
            let mut coupling = 0.0;
            for (lrow, rrow) in lambda.iter().zip(&state.rd) {
                for (l, r) in lrow.iter().zip(rrow) {
                    coupling += l * r + 0.5 * rho * r * r;
                }
            }
            trace.push(TraceRecord {
                k: state.k,
                rho,
                rd_l1: l1,
                rd_linf: state.rd_linf(),
                aug_obj: true_obj + coupling,
                true_obj,
                ms: if config.timing {
                    start.elapsed().as_secs_f64() * 1e3
                } else {
                    0.0
                },
            });
        }

        if state.k % config.m == 0 {
            state.rho *= config.alpha;
            if l1 <= epsilon {
                converged = true;
                break;
            }
            if !state.rho.is_finite() {
                break;
            }
        }
    }
    if !converged && state.rd_l1() <= epsilon && state.k > 0 {
        converged = true;
    }

    Ok(SolveResult {
        objective: evaluate_objective(inst, &state.schedule)?,
        rd_l1: state.rd_l1(),
        rd_linf: state.rd_linf(),
        iterations: state.k,
        converged,
        trace,
        final_rho: state.rho,
        epsilon,
        inner_capped: state.inner_capped,
        schedule: state.schedule,
    })
}
