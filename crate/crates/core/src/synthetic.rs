//! Seeded random instances for tests, benchmarks and experiments.
//!
//! Sampling ranges:
//!
//! | quantity | range |
//! |---|---|
//! | `p_max` | U[50, 500] MW |
//! | `p_min` | `p_max` · U[0.1, 0.5] |
//! | `a`, `b`, `c` | U[0, 300], U[10, 40], U[0, 0.05] |
//! | `start_cost` | U[0, 1000] |
//! | ramp up/down | `p_max` · U[0.3, 1] |
//! | start-up/shut-down limit | max(`p_min`, `p_max` · U[0.4, 1]) |
//! | `UT`, `DT` | integers in [1, 8] |
//! | system peak | total `p_max` / U[1.3, 2.0] |
//! | renewable `p_max` | peak · U[0.05, 0.3] |
//! | storage limits | peak · U[0.05, 0.2]; energy_max = limit · U[2, 6] |
//! | efficiencies | U[0.85, 0.98] |
//! | line limit | ± peak · U[0.2, 0.6] |
//!
//! Generators are placed round-robin over the nodes. Lines first form a
//! chain through all nodes, then connect random pairs. The initial
//! commitment is a merit-order stack covering the first step's demand.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    validate_instance, GeneratorSpec, LineSpec, NodeSpec, RenewableSpec, StorageSpec, UcInstance,
};
use crate::{Result, UcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandProfile {
    Flat,
    /// One smooth peak per 24 steps.
    #[default]
    Daily,
    Random,
}

impl fmt::Display for DemandProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemandProfile::Flat => "flat",
            DemandProfile::Daily => "daily",
            DemandProfile::Random => "random",
        })
    }
}

impl FromStr for DemandProfile {
    type Err = UcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(DemandProfile::Flat),
            "daily" => Ok(DemandProfile::Daily),
            "random" => Ok(DemandProfile::Random),
            other => Err(UcError::Synthetic(format!(
                "unknown demand profile `{other}` (expected flat, daily or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub n_gens: usize,
    pub n_nodes: usize,
    pub n_lines: usize,
    pub n_res: usize,
    pub n_storage: usize,
    pub horizon: usize,
    pub profile: DemandProfile,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            n_gens: 3,
            n_nodes: 1,
            n_lines: 0,
            n_res: 0,
            n_storage: 0,
            horizon: 24,
            profile: DemandProfile::Daily,
        }
    }
}

fn shape(profile: DemandProfile, t: usize, rng: &mut ChaCha8Rng) -> f64 {
    match profile {
        DemandProfile::Flat => 0.9,
        // trough near step 4, peak near step 16
        DemandProfile::Daily => {
            let phase = 2.0 * PI * ((t % 24) as f64 - 4.0) / 24.0;
            0.6 + 0.4 * 0.5 * (1.0 - phase.cos())
        }
        DemandProfile::Random => rng.gen_range(0.5..1.0),
    }
}

/// Draws an instance; the same `(params, seed)` always gives the same instance.
pub fn generate_synthetic(params: &SyntheticParams, seed: u64) -> Result<UcInstance> {
    let p = params;
    if p.n_gens == 0 {
        return Err(UcError::Synthetic(
            "no capacity: at least one generator is required".into(),
        ));
    }
    if p.n_nodes == 0 {
        return Err(UcError::Synthetic("at least one node is required".into()));
    }
    if p.n_lines > 0 && p.n_nodes < 2 {
        return Err(UcError::Synthetic(format!(
            "{} lines need at least 2 nodes, got {}",
            p.n_lines, p.n_nodes
        )));
    }
    if p.horizon == 0 {
        return Err(UcError::Synthetic("horizon must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_id = |n: usize| format!("n{n}");

    let mut generators: Vec<GeneratorSpec> = (0..p.n_gens)
        .map(|g| {
            let p_max: f64 = rng.gen_range(50.0..=500.0);
            let p_min = p_max * rng.gen_range(0.1..=0.5);
            let ramp = p_max * rng.gen_range(0.3..=1.0);
            let limit = p_min.max(p_max * rng.gen_range(0.4..=1.0));
            GeneratorSpec {
                id: format!("g{g}"),
                node: node_id(g % p.n_nodes),
                p_min,
                p_max,
                a: rng.gen_range(0.0..=300.0),
                b: rng.gen_range(10.0..=40.0),
                c: rng.gen_range(0.0..=0.05),
                start_cost: rng.gen_range(0.0..=1000.0),
                ramp_up: ramp,
                ramp_down: ramp,
                startup_limit: limit,
                shutdown_limit: limit,
                min_uptime: rng.gen_range(1..=8),
                min_downtime: rng.gen_range(1..=8),
                initial_status: None,
                initial_power: None,
            }
        })
        .collect();

    let total_cap: f64 = generators.iter().map(|g| g.p_max).sum();
    let peak = total_cap / rng.gen_range(1.3..=2.0);
    let shapes: Vec<f64> = (0..p.horizon)
        .map(|t| shape(p.profile, t, &mut rng))
        .collect();

    let mut node_cap = vec![0.0; p.n_nodes];
    for (g, gen) in generators.iter().enumerate() {
        node_cap[g % p.n_nodes] += gen.p_max;
    }
    let weights: Vec<f64> = node_cap
        .iter()
        .map(|&c| {
            if p.n_lines == 0 {
                c
            } else {
                c * rng.gen_range(0.7..=1.3) + 1e-3 * total_cap
            }
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let nodes: Vec<NodeSpec> = (0..p.n_nodes)
        .map(|n| NodeSpec {
            id: node_id(n),
            demand: shapes
                .iter()
                .map(|s| peak * s * weights[n] / wsum)
                .collect(),
        })
        .collect();

    // merit-order initial commitment per node, covering the first step
    for n in 0..p.n_nodes {
        let need = nodes[n].demand[0];
        let mut idx: Vec<usize> = (0..generators.len())
            .filter(|&g| generators[g].node == nodes[n].id)
            .collect();
        idx.sort_by(|&x, &y| {
            let mc = |g: &GeneratorSpec| g.b + 2.0 * g.c * g.p_max;
            mc(&generators[x]).total_cmp(&mc(&generators[y]))
        });
        let mut covered = 0.0;
        let mut on = Vec::new();
        for g in idx {
            if covered >= need {
                break;
            }
            covered += generators[g].p_max;
            on.push(g);
        }
        let min_sum: f64 = on.iter().map(|&g| generators[g].p_min).sum();
        let frac = if covered > min_sum {
            ((need - min_sum) / (covered - min_sum)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        for g in on {
            let gen = &mut generators[g];
            gen.initial_status = Some(i64::from(gen.min_uptime));
            gen.initial_power = Some(gen.p_min + frac * (gen.p_max - gen.p_min));
        }
    }

    let renewables = (0..p.n_res)
        .map(|r| {
            let mut af: f64 = rng.gen_range(0.2..=0.9);
            let availability = (0..p.horizon)
                .map(|_| {
                    af = (af + rng.gen_range(-0.15..=0.15)).clamp(0.0, 1.0);
                    af
                })
                .collect();
            RenewableSpec {
                id: format!("r{r}"),
                node: node_id(rng.gen_range(0..p.n_nodes)),
                p_max: peak * rng.gen_range(0.05..=0.3),
                availability,
            }
        })
        .collect();

    let storage = (0..p.n_storage)
        .map(|s| {
            let limit = peak * rng.gen_range(0.05..=0.2);
            let energy_max = limit * rng.gen_range(2.0..=6.0);
            StorageSpec {
                id: format!("s{s}"),
                node: node_id(rng.gen_range(0..p.n_nodes)),
                charge_limit: limit,
                discharge_limit: limit,
                energy_min: 0.1 * energy_max,
                energy_max,
                charge_eff: rng.gen_range(0.85..=0.98),
                discharge_eff: rng.gen_range(0.85..=0.98),
                initial_energy: Some(0.5 * energy_max),
            }
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = (1..p.n_nodes).map(|n| (n - 1, n)).collect();
    let mut extra: Vec<(usize, usize)> = (0..p.n_nodes)
        .flat_map(|a| (a + 2..p.n_nodes).map(move |b| (a, b)))
        .collect();
    extra.shuffle(&mut rng);
    pairs.extend(extra);
    let lines = (0..p.n_lines)
        .map(|l| {
            // parallel lines once every pair is used
            let (a, b) = pairs[l % pairs.len()];
            let f_max = peak * rng.gen_range(0.2..=0.6);
            LineSpec {
                id: format!("l{l}"),
                from: node_id(a),
                to: node_id(b),
                f_min: -f_max,
                f_max,
            }
        })
        .collect();

    let inst = UcInstance {
        horizon: p.horizon,
        nodes,
        generators,
        renewables,
        storage,
        lines,
    };
    let report = validate_instance(&inst);
    if !report.is_valid() {
        return Err(UcError::Validation(report));
    }
    Ok(inst)
}
