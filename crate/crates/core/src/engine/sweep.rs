use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::state::node_supply;
use super::AdmmState;
use crate::model::{residual_demand, UcInstance};
use crate::subproblems::{
    res_update, solve_transmission_step, storage_dispatch, StorageDispatch, TransmissionStepProblem,
};
use crate::unit_dp::solve_1uc;
use crate::Result;

const STORAGE_TOL: f64 = 1e-8;

/// `λ ← λ + ρ·RD` elementwise.
pub fn update_multipliers(state: &mut AdmmState) {
    let rho = state.rho;
    for (lrow, rrow) in state.lambda.iter_mut().zip(&state.rd) {
        for (l, r) in lrow.iter_mut().zip(rrow) {
            *l += rho * r;
        }
    }
}

/// Writes a unit's new output into the schedule and keeps `supply` current.
fn replace(supply: &mut [f64], old: &mut [f64], new: &[f64]) {
    for ((s, o), n) in supply.iter_mut().zip(old.iter_mut()).zip(new) {
        *s += n - *o;
        *o = *n;
    }
}

/// Everything at a node except one unit's own output, as a target for that unit.
fn target(demand: &[f64], supply: &[f64], own: &[f64]) -> Vec<f64> {
    demand
        .iter()
        .zip(supply)
        .zip(own)
        .map(|((d, s), o)| d - (s - o))
        .collect()
}

fn transmission_problem(
    inst: &UcInstance,
    state: &AdmmState,
    t: usize,
    residual: Vec<f64>,
) -> TransmissionStepProblem {
    let topo = &state.topo;
    TransmissionStepProblem {
        lambda: state.lambda.iter().map(|r| r[t]).collect(),
        residual,
        inj: state.inner_inj.iter().map(|r| r[t]).collect(),
        f: state.schedule.f.iter().map(|r| r[t]).collect(),
        pi: state.pi.iter().map(|r| r[t]).collect(),
        line_from: topo.line_from.clone(),
        line_to: topo.line_to.clone(),
        f_min: inst.lines.iter().map(|l| l.f_min).collect(),
        f_max: inst.lines.iter().map(|l| l.f_max).collect(),
        rho: state.rho,
        rho_trans: state.config.rho_trans_for(state.rho),
    }
}

/// Solves every step's transmission problem against `residual[n][t]` and
/// stores flows, multipliers and `inj = net inflow`.
fn transmission_phase(inst: &UcInstance, state: &mut AdmmState, residual: &[Vec<f64>]) {
    if inst.lines.is_empty() {
        return;
    }
    let (tol, cap) = (state.inner_tol, state.config.inner_max_iters);
    let results: Vec<_> = (0..inst.horizon)
        .into_par_iter()
        .map(|t| {
            let r = residual.iter().map(|row| row[t]).collect();
            solve_transmission_step(&transmission_problem(inst, state, t, r), tol, cap)
        })
        .collect();
    for (t, res) in results.into_iter().enumerate() {
        if !res.converged {
            state.inner_capped += 1;
        }
        for (l, &x) in res.f.iter().enumerate() {
            state.schedule.f[l][t] = x;
        }
        for n in 0..inst.nodes.len() {
            state.pi[n][t] = res.pi[n];
            state.inner_inj[n][t] = res.inj[n];
            state.schedule.inj[n][t] = state.topo.net_inflow(n, |l| res.f[l]);
        }
    }
}

fn finish_sweep(inst: &UcInstance, state: &mut AdmmState) -> Result<()> {
    state.rd = residual_demand(inst, &state.schedule)?;
    state.k += 1;
    Ok(())
}

fn store_storage(state: &mut AdmmState, s: usize, d: StorageDispatch) {
    state.schedule.pc[s] = d.pc;
    state.schedule.pd[s] = d.pd;
    state.schedule.pe[s] = d.pe;
}

/// One sweep over all blocks, each seeing the freshest iterates: generators
/// in a freshly shuffled order, then renewables, storage and transmission,
/// followed by the multiplier update.
pub fn gauss_seidel_iteration(state: &mut AdmmState, inst: &UcInstance) -> Result<()> {
    let rho = state.rho;
    let mut supply = node_supply(inst, &state.topo, &state.schedule);
    let demand = |n: usize| &inst.nodes[n].demand;

    let mut order: Vec<usize> = (0..inst.generators.len()).collect();
    order.shuffle(&mut state.rng);
    for g in order {
        let n = state.topo.gen_node[g];
        let r = target(demand(n), &supply[n], &state.schedule.p[g]);
        let sol = solve_1uc(&inst.generators[g], &state.lambda[n], &r, rho)?;
        replace(&mut supply[n], &mut state.schedule.p[g], &sol.p);
        state.schedule.u[g] = sol.u;
        state.schedule.v[g] = sol.v;
        state.schedule.w[g] = sol.w;
    }

    for (i, res) in inst.renewables.iter().enumerate() {
        let n = state.topo.res_node[i];
        let r = target(demand(n), &supply[n], &state.schedule.p_res[i]);
        let p: Vec<f64> = (0..inst.horizon)
            .map(|t| res_update(state.lambda[n][t], r[t], rho, res.cap(t)))
            .collect();
        replace(&mut supply[n], &mut state.schedule.p_res[i], &p);
    }

    for (s, spec) in inst.storage.iter().enumerate() {
        let n = state.topo.storage_node[s];
        let r = target(demand(n), &supply[n], &state.schedule.p_st[s]);
        let d = storage_dispatch(spec, &state.lambda[n], &r, rho, STORAGE_TOL)?;
        replace(&mut supply[n], &mut state.schedule.p_st[s], &d.p_st);
        store_storage(state, s, d);
    }

    if !inst.lines.is_empty() {
        let residual: Vec<Vec<f64>> = (0..inst.nodes.len())
            .map(|n| target(demand(n), &supply[n], &state.schedule.inj[n]))
            .collect();
        transmission_phase(inst, state, &residual);
    }

    finish_sweep(inst, state)?;
    update_multipliers(state);
    Ok(())
}

/// Number of blocks sharing each node's balance; at least one.
fn blocks_per_node(inst: &UcInstance, state: &AdmmState) -> Vec<f64> {
    let topo = &state.topo;
    let mut count = vec![0usize; inst.nodes.len()];
    for &n in topo
        .gen_node
        .iter()
        .chain(&topo.res_node)
        .chain(&topo.storage_node)
    {
        count[n] += 1;
    }
    for (n, lines) in topo.node_lines.iter().enumerate() {
        if !lines.is_empty() {
            count[n] += 1;
        }
    }
    count.into_iter().map(|c| c.max(1) as f64).collect()
}

/// One exchange-style sweep: every block is solved against the previous
/// iterate with proximal centre `own output + RD / n_blocks` at its node,
/// then `λ ← λ + ρ·RD / n_blocks`.
pub fn exchange_iteration(state: &mut AdmmState, inst: &UcInstance) -> Result<()> {
    let rho = state.rho;
    let share = blocks_per_node(inst, state);
    let rd = &state.rd;
    let centre = |n: usize, own: &[f64]| -> Vec<f64> {
        own.iter()
            .zip(&rd[n])
            .map(|(p, r)| p + r / share[n])
            .collect()
    };

    let gens: Vec<_> = (0..inst.generators.len())
        .into_par_iter()
        .map(|g| {
            let n = state.topo.gen_node[g];
            solve_1uc(
                &inst.generators[g],
                &state.lambda[n],
                &centre(n, &state.schedule.p[g]),
                rho,
            )
        })
        .collect::<Result<_>>()?;
    let res: Vec<Vec<f64>> = inst
        .renewables
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let n = state.topo.res_node[i];
            let c = centre(n, &state.schedule.p_res[i]);
            (0..inst.horizon)
                .map(|t| res_update(state.lambda[n][t], c[t], rho, spec.cap(t)))
                .collect()
        })
        .collect();
    let stor: Vec<_> = inst
        .storage
        .par_iter()
        .enumerate()
        .map(|(s, spec)| {
            let n = state.topo.storage_node[s];
            storage_dispatch(
                spec,
                &state.lambda[n],
                &centre(n, &state.schedule.p_st[s]),
                rho,
                STORAGE_TOL,
            )
        })
        .collect::<Result<_>>()?;
    let trans_target: Vec<Vec<f64>> = (0..inst.nodes.len())
        .map(|n| centre(n, &state.schedule.inj[n]))
        .collect();

    for (g, sol) in gens.into_iter().enumerate() {
        state.schedule.u[g] = sol.u;
        state.schedule.v[g] = sol.v;
        state.schedule.w[g] = sol.w;
        state.schedule.p[g] = sol.p;
    }
    for (i, p) in res.into_iter().enumerate() {
        state.schedule.p_res[i] = p;
    }
    for (s, d) in stor.into_iter().enumerate() {
        state.schedule.p_st[s] = d.p_st.clone();
        store_storage(state, s, d);
    }
    transmission_phase(inst, state, &trans_target);

    finish_sweep(inst, state)?;
    for (n, (lrow, rrow)) in state.lambda.iter_mut().zip(&state.rd).enumerate() {
        for (l, r) in lrow.iter_mut().zip(rrow) {
            *l += rho * r / share[n];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{init_state, SolverConfig};
    use crate::model::fixtures::{generator, single_node};

    #[test]
    fn multiplier_arithmetic() {
        let inst = single_node(vec![10.0], vec![generator("g")]);
        let mut s = init_state(
            &inst,
            &SolverConfig {
                lambda_range: Some((1.0, 1.0)),
                ..Default::default()
            },
        )
        .unwrap();
        s.rho = 0.5;
        s.rd = vec![vec![2.0]];
        update_multipliers(&mut s);
        assert_eq!(s.lambda, vec![vec![2.0]]);

        s.lambda = vec![vec![0.0]];
        s.rho = 1.0;
        s.rd = vec![vec![-3.0]];
        update_multipliers(&mut s);
        assert_eq!(s.lambda, vec![vec![-3.0]]);

        s.rd = vec![vec![0.0]];
        update_multipliers(&mut s);
        assert_eq!(s.lambda, vec![vec![-3.0]]);
        s.rho = 0.0;
        s.rd = vec![vec![7.0]];
        update_multipliers(&mut s);
        assert_eq!(s.lambda, vec![vec![-3.0]]);
    }

    #[test]
    fn one_sweep_reduces_residual() {
        let inst = single_node(vec![50.0, 80.0, 60.0], vec![generator("g")]);
        let mut s = init_state(
            &inst,
            &SolverConfig {
                rho0: 10.0,
                lambda_range: Some((0.0, 0.0)),
                ..Default::default()
            },
        )
        .unwrap();
        let before = s.rd_l1();
        gauss_seidel_iteration(&mut s, &inst).unwrap();
        assert!(s.rd_l1() < before, "{} -> {}", before, s.rd_l1());
        assert_eq!(s.k, 1);
    }

    #[test]
    fn no_lines_keeps_injection_zero() {
        let inst = single_node(vec![50.0, 80.0], vec![generator("g")]);
        let mut s = init_state(&inst, &SolverConfig::default()).unwrap();
        for _ in 0..3 {
            gauss_seidel_iteration(&mut s, &inst).unwrap();
        }
        assert!(s.schedule.inj.iter().flatten().all(|&x| x == 0.0));
    }
}
