use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SolverConfig;
use crate::model::{residual_demand, validate_instance, Schedule, Topology, UcInstance};
use crate::{Result, UcError};

/// Iterates, multipliers and penalty of a running solve.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub schedule: Schedule,
    /// Nodal multipliers, `[node][t]`.
    pub lambda: Vec<Vec<f64>>,
    /// Inner transmission multipliers, `[node][t]`.
    pub pi: Vec<Vec<f64>>,
    /// Inner transmission injections, kept as the warm start of the next
    /// sweep. The schedule's `inj` is the line inflow itself.
    pub inner_inj: Vec<Vec<f64>>,
    pub rho: f64,
    /// Completed sweeps.
    pub k: usize,
    /// Residual demand after the last sweep, `[node][t]`.
    pub rd: Vec<Vec<f64>>,
    /// Inner transmission solves that stopped at their iteration cap.
    pub inner_capped: usize,
    pub(crate) topo: Topology,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) config: SolverConfig,
    pub(crate) inner_tol: f64,
}

impl AdmmState {
    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn rd_l1(&self) -> f64 {
        self.rd.iter().flatten().map(|x| x.abs()).sum()
    }

    pub fn rd_linf(&self) -> f64 {
        self.rd.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Zero iterates, `π = 0`, `ρ = ρ0` and `λ` drawn uniformly from the
/// configured range with the configured seed.
pub fn init_state(inst: &UcInstance, config: &SolverConfig) -> Result<AdmmState> {
    let report = validate_instance(inst);
    if !report.is_valid() {
        return Err(UcError::Validation(report));
    }
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi) = config.lambda_range_for(inst);
    let nodes = inst.nodes.len();
    let horizon = inst.horizon;
    let lambda = (0..nodes)
        .map(|_| {
            (0..horizon)
                .map(|_| if lo < hi { rng.gen_range(lo..hi) } else { lo })
                .collect()
        })
        .collect();
    let schedule = Schedule::zeros(inst);
    let rd = residual_demand(inst, &schedule)?;
    Ok(AdmmState {
        schedule,
        lambda,
        pi: vec![vec![0.0; horizon]; nodes],
        inner_inj: vec![vec![0.0; horizon]; nodes],
        rho: config.rho0,
        k: 0,
        rd,
        inner_capped: 0,
        topo: inst.topology(),
        rng,
        config: config.clone(),
        inner_tol: config.inner_tol_for(inst),
    })
}

/// Node totals of every block's output plus injections, `[node][t]`.
pub(crate) fn node_supply(inst: &UcInstance, topo: &Topology, s: &Schedule) -> Vec<Vec<f64>> {
    let mut sup = vec![vec![0.0; inst.horizon]; inst.nodes.len()];
    let mut add = |n: usize, row: &[f64]| {
        for (a, b) in sup[n].iter_mut().zip(row) {
            *a += b;
        }
    };
    for (g, &n) in topo.gen_node.iter().enumerate() {
        add(n, &s.p[g]);
    }
    for (r, &n) in topo.res_node.iter().enumerate() {
        add(n, &s.p_res[r]);
    }
    for (i, &n) in topo.storage_node.iter().enumerate() {
        add(n, &s.p_st[i]);
    }
    for (n, row) in s.inj.iter().enumerate() {
        add(n, row);
    }
    sup
}
