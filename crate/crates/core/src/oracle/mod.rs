//! Reference solvers used to check the ADMM results: dispatch for a fixed
//! commitment, the convex relaxation, and exhaustive search on tiny instances.

mod exact;
mod model;

use crate::model::{GeneratorSpec, Schedule, UcInstance};
use crate::{Result, UcError};

pub use exact::{solve_exact_tiny, ExactSolution, TINY_LIMITS};
use model::{formulate, solve, Commitment};

/// Optimal dispatch of every continuous variable for a fixed commitment `u`
/// (one row per generator). Start-ups and shut-downs follow from `u` and
/// the initial status.
pub fn dispatch_given_commitment(inst: &UcInstance, u: &[Vec<bool>]) -> Result<(Schedule, f64)> {
    if u.len() != inst.generators.len() || u.iter().any(|r| r.len() != inst.horizon) {
        return Err(UcError::Dimension(format!(
            "commitment must be {} x {}",
            inst.generators.len(),
            inst.horizon
        )));
    }
    for (gen, row) in inst.generators.iter().zip(u) {
        if let Some(t) = first_run_violation(gen, row) {
            return Err(UcError::InvalidCommitment(format!(
                "generator {} breaks its minimum up/down time at step {t}",
                gen.id
            )));
        }
    }
    let form = formulate(inst, Commitment::Fixed(u));
    let x = solve(&form, "commitment admits no feasible dispatch")?;
    let schedule = form.decode(inst, &x).schedule;
    let cost = crate::model::evaluate_objective(inst, &schedule)?;
    Ok((schedule, cost))
}

/// Solution of the relaxation with commitments in [0, 1].
#[derive(Debug, Clone)]
pub struct RelaxedSolution {
    /// Dispatch, with the flags rounded at 0.5.
    pub schedule: Schedule,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub objective: f64,
}

/// Solves the convex relaxation: binaries in [0, 1], linear ramp and
/// minimum up/down constraints. Its objective bounds the integer optimum
/// from below.
pub fn solve_convexified(inst: &UcInstance) -> Result<RelaxedSolution> {
    let form = formulate(inst, Commitment::Relaxed);
    let x = solve(&form, "relaxation is infeasible")?;
    let objective = form.qp.objective(&x);
    let d = form.decode(inst, &x);
    Ok(RelaxedSolution {
        schedule: d.schedule,
        u: d.u,
        v: d.v,
        w: d.w,
        objective,
    })
}

/// Cost of an ADMM result measured against an exact optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    /// Objective of the schedule as returned, balance residual included.
    pub raw: f64,
    /// Cost of the returned commitment after an exact re-dispatch, `None`
    /// when that commitment cannot meet demand exactly.
    pub redispatched: Option<f64>,
}

impl Assessment {
    /// Re-dispatched cost when available, the raw objective otherwise.
    pub fn value(&self) -> f64 {
        self.redispatched.unwrap_or(self.raw)
    }

    /// Percentage gap of [`Assessment::value`] over `optimum`.
    pub fn gap_percent(&self, optimum: f64) -> f64 {
        100.0 * (self.value() - optimum) / optimum.abs().max(f64::MIN_POSITIVE)
    }
}

/// Re-dispatches the commitment of `schedule`.
pub fn assess(inst: &UcInstance, schedule: &Schedule) -> Result<Assessment> {
    let raw = crate::model::evaluate_objective(inst, schedule)?;
    let redispatched = match dispatch_given_commitment(inst, &schedule.u) {
        Ok((_, c)) => Some(c),
        Err(UcError::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Assessment { raw, redispatched })
}

/// First step at which `u` violates a minimum up or down time, counting the
/// run in progress before the horizon.
pub fn first_run_violation(gen: &GeneratorSpec, u: &[bool]) -> Option<usize> {
    let status = gen.initial_status();
    let ut = i64::from(gen.min_uptime.max(1));
    let dt = i64::from(gen.min_downtime.max(1));
    // signed length of the current run
    let mut run = status;
    for (t, &on) in u.iter().enumerate() {
        let was_on = run > 0;
        if on != was_on {
            if was_on && run < ut || !was_on && -run < dt {
                return Some(t);
            }
            run = 0;
        }
        run = if on { run.max(0) + 1 } else { run.min(0) - 1 };
    }
    None
}

/// Every on/off pattern of length `horizon` that respects the generator's
/// minimum up and down times.
pub fn unit_commitment_patterns(gen: &GeneratorSpec, horizon: usize) -> Vec<Vec<bool>> {
    let ut = i64::from(gen.min_uptime.max(1));
    let dt = i64::from(gen.min_downtime.max(1));
    let mut out = Vec::new();
    let mut stack = vec![(Vec::with_capacity(horizon), gen.initial_status())];
    while let Some((pat, run)) = stack.pop() {
        if pat.len() == horizon {
            out.push(pat);
            continue;
        }
        let on = run > 0;
        let can_switch = if on { run >= ut } else { -run >= dt };
        let mut push = |next: bool| {
            let mut p = pat.clone();
            p.push(next);
            let r = if next == on {
                if on {
                    (run + 1).min(ut)
                } else {
                    (run - 1).max(-dt)
                }
            } else if next {
                1
            } else {
                -1
            };
            stack.push((p, r));
        };
        if can_switch {
            push(!on);
        }
        push(on);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasibility;
    use crate::model::fixtures::{generator, single_node};

    #[test]
    fn two_step_patterns_without_limits() {
        let g = generator("g");
        assert_eq!(unit_commitment_patterns(&g, 2).len(), 4);
    }

    #[test]
    fn patterns_agree_with_run_check() {
        for (ut, dt, status) in [(2, 3, -3), (3, 1, 1), (1, 2, -1), (4, 4, 2)] {
            let mut g = generator("g");
            g.min_uptime = ut;
            g.min_downtime = dt;
            g.initial_status = Some(status);
            g.initial_power = Some(50.0);
            let pats = unit_commitment_patterns(&g, 7);
            let mut n = 0;
            for mask in 0u32..(1 << 7) {
                let u: Vec<bool> = (0..7).map(|t| mask >> t & 1 == 1).collect();
                let ok = first_run_violation(&g, &u).is_none();
                assert_eq!(ok, pats.contains(&u), "{u:?}");
                n += usize::from(ok);
            }
            assert_eq!(n, pats.len());
        }
    }

    #[test]
    fn single_unit_dispatch_matches_demand() {
        let inst = single_node(vec![50.0, 90.0, 40.0], vec![generator("g")]);
        let (s, cost) = dispatch_given_commitment(&inst, &[vec![true; 3]]).unwrap();
        for (t, d) in [50.0, 90.0, 40.0].into_iter().enumerate() {
            assert!((s.p[0][t] - d).abs() < 1e-6);
        }
        let expect = 3.0 * 10.0 + 40.0 + 2.0 * 180.0 + 0.01 * (2500.0 + 8100.0 + 1600.0);
        assert!((cost - expect).abs() < 1e-5, "{cost} vs {expect}");
        assert!(check_feasibility(&inst, &s, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn uncommitted_demand_is_infeasible() {
        let inst = single_node(vec![50.0], vec![generator("g")]);
        assert!(matches!(
            dispatch_given_commitment(&inst, &[vec![false]]),
            Err(UcError::Infeasible(_))
        ));
    }

    #[test]
    fn short_run_is_rejected() {
        let mut g = generator("g");
        g.min_uptime = 3;
        let inst = single_node(vec![50.0, 50.0, 50.0], vec![g]);
        assert!(matches!(
            dispatch_given_commitment(&inst, &[vec![true, false, true]]),
            Err(UcError::InvalidCommitment(_))
        ));
    }

    #[test]
    fn cheap_unit_carries_load_in_dispatch() {
        let mut cheap = generator("cheap");
        cheap.b = 1.0;
        let inst = single_node(vec![60.0, 60.0], vec![cheap, generator("dear")]);
        let (s, _) = dispatch_given_commitment(&inst, &[vec![true; 2], vec![true; 2]]).unwrap();
        // dear unit sits at its minimum
        assert!((s.p[1][0] - 10.0).abs() < 1e-6 && (s.p[0][0] - 50.0).abs() < 1e-6);
    }

    #[test]
    fn relaxation_is_below_integer_dispatch() {
        let inst = single_node(
            vec![30.0, 120.0, 30.0],
            vec![generator("a"), generator("b")],
        );
        let relaxed = solve_convexified(&inst).unwrap();
        let (_, integer) =
            dispatch_given_commitment(&inst, &[vec![true; 3], vec![false, true, false]]).unwrap();
        assert!(relaxed.objective <= integer + 1e-6);
        for row in &relaxed.u {
            assert!(row.iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
        }
    }
}
