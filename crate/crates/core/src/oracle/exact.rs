//! Branch and bound over commitments for tiny instances.
//!
//! Commitments are enumerated one step at a time with per-unit run lengths,
//! so only patterns that respect minimum up/down times are visited. Each
//! partial commitment is bounded below by its start-up costs plus, for every
//! step, a copper-plate dispatch ignoring ramps (renewables free up to their
//! cap, storage free within its power limits). Surviving leaves get an exact
//! dispatch.

use super::dispatch_given_commitment;
use crate::model::{GeneratorSpec, Schedule, UcInstance};
use crate::{Result, UcError};

/// Largest instance accepted: (generators, steps, storage units, lines).
pub const TINY_LIMITS: (usize, usize, usize, usize) = (4, 10, 1, 2);

#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub schedule: Schedule,
    pub objective: f64,
    /// Commitments that were dispatched exactly.
    pub leaves: usize,
}

/// Global optimum of a tiny instance.
pub fn solve_exact_tiny(inst: &UcInstance) -> Result<ExactSolution> {
    let (gmax, tmax, smax, lmax) = TINY_LIMITS;
    let g = inst.generators.len();
    if g > gmax || inst.horizon > tmax || inst.storage.len() > smax || inst.lines.len() > lmax {
        return Err(UcError::BudgetExceeded(format!(
            "exact search handles at most {gmax} generators, {tmax} steps, {smax} storage unit and \
             {lmax} lines; got {g}, {}, {}, {}",
            inst.horizon,
            inst.storage.len(),
            inst.lines.len()
        )));
    }
    let masks = 1usize << g;
    let step_lb: Vec<Vec<f64>> = (0..inst.horizon)
        .map(|t| (0..masks).map(|m| copper_plate_bound(inst, t, m)).collect())
        .collect();
    let mut suffix = vec![0.0; inst.horizon + 1];
    for t in (0..inst.horizon).rev() {
        let best = step_lb[t].iter().copied().fold(f64::INFINITY, f64::min);
        suffix[t] = suffix[t + 1] + best;
    }
    let mut search = Search {
        inst,
        step_lb,
        suffix,
        best: None,
        leaves: 0,
        path: Vec::with_capacity(inst.horizon),
    };
    let runs: Vec<i64> = inst
        .generators
        .iter()
        .map(GeneratorSpec::initial_status)
        .collect();
    search.descend(&runs, 0.0)?;
    let (schedule, objective) = search
        .best
        .ok_or_else(|| UcError::Infeasible("no commitment admits a feasible dispatch".into()))?;
    Ok(ExactSolution {
        schedule,
        objective,
        leaves: search.leaves,
    })
}

struct Search<'a> {
    inst: &'a UcInstance,
    step_lb: Vec<Vec<f64>>,
    suffix: Vec<f64>,
    best: Option<(Schedule, f64)>,
    leaves: usize,
    path: Vec<usize>,
}

impl Search<'_> {
    fn incumbent(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.1)
    }

    fn descend(&mut self, runs: &[i64], acc: f64) -> Result<()> {
        let t = self.path.len();
        let gens = &self.inst.generators;
        if t == self.inst.horizon {
            return self.leaf();
        }
        let mut children: Vec<(f64, usize, Vec<i64>)> = Vec::new();
        'mask: for mask in 0..1usize << gens.len() {
            let mut next = Vec::with_capacity(gens.len());
            let mut start_cost = 0.0;
            for (i, gen) in gens.iter().enumerate() {
                let on = mask >> i & 1 == 1;
                let run = runs[i];
                let ut = i64::from(gen.min_uptime.max(1));
                let dt = i64::from(gen.min_downtime.max(1));
                let r = match (run > 0, on) {
                    (true, true) => (run + 1).min(ut),
                    (false, false) => (run - 1).max(-dt),
                    (true, false) if run >= ut => -1,
                    (false, true) if -run >= dt => {
                        start_cost += gen.start_cost;
                        1
                    }
                    _ => continue 'mask,
                };
                next.push(r);
            }
            let lb = self.step_lb[t][mask];
            if lb.is_finite() {
                children.push((acc + start_cost + lb, mask, next));
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (cost, mask, next) in children {
            if cost + self.suffix[t + 1] >= self.incumbent() {
                break;
            }
            self.path.push(mask);
            self.descend(&next, cost)?;
            self.path.pop();
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        self.leaves += 1;
        let u: Vec<Vec<bool>> = (0..self.inst.generators.len())
            .map(|i| self.path.iter().map(|m| m >> i & 1 == 1).collect())
            .collect();
        match dispatch_given_commitment(self.inst, &u) {
            Ok((s, cost)) => {
                if cost < self.incumbent() {
                    self.best = Some((s, cost));
                }
                Ok(())
            }
            Err(UcError::Infeasible(_)) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

/// Lower bound on the step cost of the units in `mask`, ignoring the network
/// and ramping. Infinite when the committed range cannot meet demand.
fn copper_plate_bound(inst: &UcInstance, t: usize, mask: usize) -> f64 {
    let on: Vec<&GeneratorSpec> = inst
        .generators
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, g)| g)
        .collect();
    let demand = inst.total_demand(t);
    let res: f64 = inst.renewables.iter().map(|r| r.cap(t)).sum();
    let discharge: f64 = inst.storage.iter().map(|s| s.discharge_limit).sum();
    let charge: f64 = inst.storage.iter().map(|s| s.charge_limit).sum();
    let need = demand - res - discharge;
    let room = demand + charge;
    let lo: f64 = on.iter().map(|g| g.p_min).sum();
    let hi: f64 = on.iter().map(|g| g.p_max).sum();
    let slack = 1e-7 * (1.0 + demand.abs());
    if hi < need - slack || lo > room + slack {
        return f64::INFINITY;
    }
    let fixed: f64 = on.iter().map(|g| g.a).sum();
    if need <= lo {
        // every unit at its minimum is cheapest, since costs are increasing
        return fixed + on.iter().map(|g| cost(g, g.p_min)).sum::<f64>();
    }
    // Lagrangian dual of min Σ cost(p) s.t. Σ p ≥ need; any multiplier gives
    // a valid bound, bisection finds a near-optimal one
    let dual = |mu: f64| -> (f64, f64) {
        let mut val = mu * need;
        let mut sum = 0.0;
        for g in &on {
            let p = if g.c > 0.0 {
                ((mu - g.b) / (2.0 * g.c)).clamp(g.p_min, g.p_max)
            } else if mu > g.b {
                g.p_max
            } else {
                g.p_min
            };
            val += cost(g, p) - mu * p;
            sum += p;
        }
        (val, sum)
    };
    let mut a = 0.0;
    let mut b = on
        .iter()
        .map(|g| g.b + 2.0 * g.c * g.p_max)
        .fold(0.0, f64::max)
        + 1.0;
    let mut best = dual(0.0).0;
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        let (val, sum) = dual(mid);
        best = best.max(val);
        if sum < need {
            a = mid;
        } else {
            b = mid;
        }
    }
    best = best.max(dual(a).0).max(dual(b).0);
    fixed + best - 1e-9 * (1.0 + best.abs())
}

fn cost(g: &GeneratorSpec, p: f64) -> f64 {
    g.b * p + g.c * p * p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasibility;
    use crate::model::fixtures::{generator, single_node};
    use crate::oracle::unit_commitment_patterns;

    #[test]
    fn over_budget_is_refused() {
        let gens = (0..5).map(|i| generator(&format!("g{i}"))).collect();
        let inst = single_node(vec![50.0; 2], gens);
        assert!(matches!(
            solve_exact_tiny(&inst),
            Err(UcError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn matches_full_enumeration() {
        let mut a = generator("a");
        a.b = 1.0;
        a.a = 200.0;
        a.min_uptime = 2;
        let mut b = generator("b");
        b.b = 3.0;
        b.start_cost = 5.0;
        b.min_downtime = 2;
        let inst = single_node(vec![20.0, 90.0, 130.0, 40.0, 15.0], vec![a, b]);
        let pa = unit_commitment_patterns(&inst.generators[0], 5);
        let pb = unit_commitment_patterns(&inst.generators[1], 5);
        let mut best = f64::INFINITY;
        for x in &pa {
            for y in &pb {
                if let Ok((_, c)) = dispatch_given_commitment(&inst, &[x.clone(), y.clone()]) {
                    best = best.min(c);
                }
            }
        }
        let exact = solve_exact_tiny(&inst).unwrap();
        assert!(
            (exact.objective - best).abs() <= 1e-6 * best,
            "{} vs {best}",
            exact.objective
        );
        assert!(check_feasibility(&inst, &exact.schedule, 1e-6)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bound_never_exceeds_dispatch() {
        let inst = single_node(vec![110.0], vec![generator("a"), generator("b")]);
        // both units start, which the bound leaves to the search
        let lb = copper_plate_bound(&inst, 0, 0b11) + 80.0;
        let (_, c) = dispatch_given_commitment(&inst, &[vec![true], vec![true]]).unwrap();
        assert!(lb <= c + 1e-9 && lb > c - 1e-3, "{lb} vs {c}");
    }
}
