//! Instance and schedule types for the network-constrained unit commitment
//! problem, together with objective evaluation, feasibility checking and the
//! residual-demand computation that couples every subproblem.
//!
//! Units: power in MW, energy in MWh, one time step per series entry.

mod feasibility;
mod objective;
mod validate;

use serde::{Deserialize, Serialize};

pub use feasibility::{check_feasibility, Constraint, Violation};
pub use objective::{evaluate_objective, residual_demand};
pub use validate::{validate_instance, ValidationIssue, ValidationReport};

/// A thermal generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: String,
    pub node: String,
    pub p_min: f64,
    pub p_max: f64,
    /// Constant cost per committed step.
    pub a: f64,
    /// Linear cost per MWh.
    pub b: f64,
    /// Quadratic cost per MWh².
    pub c: f64,
    pub start_cost: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub startup_limit: f64,
    pub shutdown_limit: f64,
    pub min_uptime: u32,
    pub min_downtime: u32,
    /// `+k`: on for `k` steps before the horizon, `-k`: off for `k` steps.
    /// Defaults to a cold start long enough to free the first transition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_status: Option<i64>,
    /// Output in the step before the horizon (only meaningful when on).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_power: Option<f64>,
}

impl GeneratorSpec {
    pub fn initial_status(&self) -> i64 {
        self.initial_status
            .unwrap_or_else(|| -i64::from(self.min_uptime.max(self.min_downtime).max(1)))
    }

    pub fn initially_on(&self) -> bool {
        self.initial_status() > 0
    }

    pub fn initial_power(&self) -> f64 {
        if self.initially_on() {
            self.initial_power.unwrap_or(0.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewableSpec {
    pub id: String,
    pub node: String,
    pub p_max: f64,
    /// Availability factor per step, in `[0, 1]`.
    pub availability: Vec<f64>,
}

impl RenewableSpec {
    pub fn cap(&self, t: usize) -> f64 {
        self.availability[t] * self.p_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageSpec {
    pub id: String,
    pub node: String,
    pub charge_limit: f64,
    pub discharge_limit: f64,
    pub energy_min: f64,
    pub energy_max: f64,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    /// Energy before the first step; defaults to `energy_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_energy: Option<f64>,
}

impl StorageSpec {
    pub fn initial_energy(&self) -> f64 {
        self.initial_energy.unwrap_or(self.energy_min)
    }
}

/// A transmission line. Positive flow runs from `from` into `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub f_min: f64,
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    pub demand: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcInstance {
    pub horizon: usize,
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub renewables: Vec<RenewableSpec>,
    #[serde(default)]
    pub storage: Vec<StorageSpec>,
    #[serde(default)]
    pub lines: Vec<LineSpec>,
}

impl UcInstance {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn demand(&self, n: usize, t: usize) -> f64 {
        self.nodes[n].demand[t]
    }

    /// Total demand over all nodes at step `t`.
    pub fn total_demand(&self, t: usize) -> f64 {
        self.nodes.iter().map(|n| n.demand[t]).sum()
    }

    /// Keeps only the first `horizon` steps of every series.
    pub fn truncated(&self, horizon: usize) -> UcInstance {
        let horizon = horizon.min(self.horizon);
        let mut out = self.clone();
        out.horizon = horizon;
        for n in &mut out.nodes {
            n.demand.truncate(horizon);
        }
        for r in &mut out.renewables {
            r.availability.truncate(horizon);
        }
        out
    }

    /// Resolves node references to indices. Call on validated instances only.
    pub fn topology(&self) -> Topology {
        Topology::new(self)
    }
}

/// Index form of the references inside a [`UcInstance`].
#[derive(Debug, Clone)]
pub struct Topology {
    pub gen_node: Vec<usize>,
    pub res_node: Vec<usize>,
    pub storage_node: Vec<usize>,
    pub line_from: Vec<usize>,
    pub line_to: Vec<usize>,
    /// Lines incident to each node with the sign flow enters that node's balance.
    pub node_lines: Vec<Vec<(usize, f64)>>,
}

impl Topology {
    fn new(inst: &UcInstance) -> Self {
        let idx = |id: &str| {
            inst.node_index(id)
                .unwrap_or_else(|| panic!("unknown node `{id}`; validate the instance first"))
        };
        let line_from: Vec<usize> = inst.lines.iter().map(|l| idx(&l.from)).collect();
        let line_to: Vec<usize> = inst.lines.iter().map(|l| idx(&l.to)).collect();
        let mut node_lines = vec![Vec::new(); inst.nodes.len()];
        for (l, (&a, &b)) in line_from.iter().zip(&line_to).enumerate() {
            node_lines[a].push((l, -1.0));
            node_lines[b].push((l, 1.0));
        }
        Topology {
            gen_node: inst.generators.iter().map(|g| idx(&g.node)).collect(),
            res_node: inst.renewables.iter().map(|r| idx(&r.node)).collect(),
            storage_node: inst.storage.iter().map(|s| idx(&s.node)).collect(),
            line_from,
            line_to,
            node_lines,
        }
    }

    /// Net inflow into node `n` given line flows at one step.
    pub fn net_inflow(&self, n: usize, flows: impl Fn(usize) -> f64) -> f64 {
        self.node_lines[n].iter().map(|&(l, s)| s * flows(l)).sum()
    }
}

/// Every decision variable over the horizon. Matrices are indexed `[unit][t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub u: Vec<Vec<bool>>,
    pub v: Vec<Vec<bool>>,
    pub w: Vec<Vec<bool>>,
    pub p: Vec<Vec<f64>>,
    pub p_res: Vec<Vec<f64>>,
    pub pc: Vec<Vec<f64>>,
    pub pd: Vec<Vec<f64>>,
    pub pe: Vec<Vec<f64>>,
    pub p_st: Vec<Vec<f64>>,
    pub inj: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl Schedule {
    /// All-off, all-zero schedule; storage energy sits at its initial level.
    pub fn zeros(inst: &UcInstance) -> Self {
        let t = inst.horizon;
        let b = |n: usize| vec![vec![false; t]; n];
        let z = |n: usize| vec![vec![0.0; t]; n];
        Schedule {
            u: b(inst.generators.len()),
            v: b(inst.generators.len()),
            w: b(inst.generators.len()),
            p: z(inst.generators.len()),
            p_res: z(inst.renewables.len()),
            pc: z(inst.storage.len()),
            pd: z(inst.storage.len()),
            pe: inst
                .storage
                .iter()
                .map(|s| vec![s.initial_energy(); t])
                .collect(),
            p_st: z(inst.storage.len()),
            inj: z(inst.nodes.len()),
            f: z(inst.lines.len()),
        }
    }

    /// Checks every matrix against the instance dimensions.
    pub fn check_dimensions(&self, inst: &UcInstance) -> crate::Result<()> {
        fn rows<T>(name: &str, m: &[Vec<T>], units: usize, horizon: usize) -> crate::Result<()> {
            if m.len() != units {
                return Err(crate::UcError::Dimension(format!(
                    "`{name}` has {} rows, expected {units}",
                    m.len()
                )));
            }
            if let Some((i, r)) = m.iter().enumerate().find(|(_, r)| r.len() != horizon) {
                return Err(crate::UcError::Dimension(format!(
                    "`{name}` row {i} has {} steps, expected {horizon}",
                    r.len()
                )));
            }
            Ok(())
        }
        let (g, t) = (inst.generators.len(), inst.horizon);
        rows("u", &self.u, g, t)?;
        rows("v", &self.v, g, t)?;
        rows("w", &self.w, g, t)?;
        rows("p", &self.p, g, t)?;
        rows("p_res", &self.p_res, inst.renewables.len(), t)?;
        let s = inst.storage.len();
        rows("pc", &self.pc, s, t)?;
        rows("pd", &self.pd, s, t)?;
        rows("pe", &self.pe, s, t)?;
        rows("p_st", &self.p_st, s, t)?;
        rows("inj", &self.inj, inst.nodes.len(), t)?;
        rows("f", &self.f, inst.lines.len(), t)?;
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn generator(id: &str) -> GeneratorSpec {
        GeneratorSpec {
            id: id.into(),
            node: "n0".into(),
            p_min: 10.0,
            p_max: 100.0,
            a: 10.0,
            b: 2.0,
            c: 0.01,
            start_cost: 40.0,
            ramp_up: 50.0,
            ramp_down: 50.0,
            startup_limit: 60.0,
            shutdown_limit: 60.0,
            min_uptime: 1,
            min_downtime: 1,
            initial_status: None,
            initial_power: None,
        }
    }

    pub fn single_node(demand: Vec<f64>, generators: Vec<GeneratorSpec>) -> UcInstance {
        UcInstance {
            horizon: demand.len(),
            nodes: vec![NodeSpec {
                id: "n0".into(),
                demand,
            }],
            generators,
            renewables: vec![],
            storage: vec![],
            lines: vec![],
        }
    }
}
