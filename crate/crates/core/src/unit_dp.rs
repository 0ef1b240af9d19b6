//! Exact single-unit commitment under a quadratic penalty.
//!
//! For one generator, given a price `λ_t` and a residual target `R_t` per
//! step, this minimises
//!
//! ```text
//!   Σ_t  u_t (a + b p_t + c p_t²) + v_t · start_cost − λ_t p_t + ρ/2 (R_t − p_t)²
//! ```
//!
//! subject to output bounds, minimum up/down times, ramping, and start-up /
//! shut-down limits. The dynamic program runs forward over time with two
//! kinds of state:
//!
//! * off states `OFF(k)`, `k = 1..=DT` (capped), carrying a scalar cost;
//! * on "chains", one per start time, each carrying a convex
//!   piecewise-quadratic cost as a function of the current output. A chain's
//!   age is capped at `UT`; chains of equal capped age share their future, so
//!   a chain dominated by an older-or-equal chain is dropped.
//!
//! Moving a chain one step takes the minimum over the ramp window, restricts
//! to `[p_min, p_max]` and adds the stage cost. The schedule is recovered by
//! walking back from the cheapest final state: within a chain the predecessor
//! output is the clamp of the previous step's minimiser into the ramp window.

use crate::model::GeneratorSpec;
use crate::pwq::PiecewiseQuadratic;
use crate::{Result, UcError};

const DOMINANCE_TOL: f64 = 1e-9;

/// Optimal single-unit schedule and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSchedule {
    pub u: Vec<bool>,
    pub v: Vec<bool>,
    pub w: Vec<bool>,
    pub p: Vec<f64>,
    pub value: f64,
}

/// Coefficients `(q2, q1, q0)` of the on-state stage cost and the off-state cost.
pub fn stage_cost_coefficients(
    gen: &GeneratorSpec,
    lambda: f64,
    residual: f64,
    rho: f64,
) -> ([f64; 3], f64) {
    let half = 0.5 * rho;
    let off = half * residual * residual;
    (
        [gen.c + half, gen.b - lambda - rho * residual, gen.a + off],
        off,
    )
}

/// On-state cost over `[p_min, p_max]` and the scalar off-state cost for one step.
///
/// The off cost is the penalty with zero output; it omits the constant `a`.
/// Start-up cost is charged on the transition, not here.
pub fn build_stage_cost(
    gen: &GeneratorSpec,
    lambda: f64,
    residual: f64,
    rho: f64,
) -> (PiecewiseQuadratic, f64) {
    let ([q2, q1, q0], off) = stage_cost_coefficients(gen, lambda, residual, rho);
    (
        PiecewiseQuadratic::quadratic(gen.p_min, gen.p_max, q2, q1, q0),
        off,
    )
}

/// Objective of a single-unit schedule under the same stage costs the DP uses.
pub fn unit_objective(
    gen: &GeneratorSpec,
    lambda: &[f64],
    residual: &[f64],
    rho: f64,
    sched: &UnitSchedule,
) -> f64 {
    let mut total = 0.0;
    for t in 0..sched.p.len() {
        let ([q2, q1, q0], off) = stage_cost_coefficients(gen, lambda[t], residual[t], rho);
        let p = sched.p[t];
        total += if sched.u[t] {
            (q2 * p + q1) * p + q0
        } else {
            off
        };
        if sched.v[t] {
            total += gen.start_cost;
        }
    }
    total
}

#[derive(Debug, Clone, Copy)]
enum OffPred {
    Initial,
    Off(usize),
    Shutdown { chain: usize, p: f64 },
}

#[derive(Debug)]
struct Chain {
    /// Step of the first entry in `trail`; `-1` for a unit online before the horizon.
    first: i64,
    age: u32,
    f: PiecewiseQuadratic,
    /// `(argmin, dom_lo, dom_hi)` of the value function at each step of the chain.
    trail: Vec<(f64, f64, f64)>,
    alive: bool,
}

impl Chain {
    fn record(&mut self) {
        let (m, _) = self.f.argmin();
        let (lo, hi) = self.f.domain();
        self.trail.push((m, lo, hi));
    }
}

/// Forward DP state for one unit over the horizon.
struct UnitDpState<'a> {
    gen: &'a GeneratorSpec,
    ut: u32,
    dt: usize,
    off: Vec<f64>,
    off_preds: Vec<Vec<OffPred>>,
    chains: Vec<Chain>,
    active: Vec<usize>,
}

impl<'a> UnitDpState<'a> {
    fn new(gen: &'a GeneratorSpec) -> Self {
        let ut = gen.min_uptime.max(1);
        let dt = gen.min_downtime.max(1) as usize;
        let mut s = UnitDpState {
            gen,
            ut,
            dt,
            off: vec![f64::INFINITY; dt],
            off_preds: Vec::new(),
            chains: Vec::new(),
            active: Vec::new(),
        };
        let status = gen.initial_status();
        if status > 0 {
            let p0 = gen.initial_power();
            let mut c = Chain {
                first: -1,
                age: (status.min(i64::from(ut))) as u32,
                f: PiecewiseQuadratic::constant(p0, p0, 0.0),
                trail: Vec::new(),
                alive: true,
            };
            c.record();
            s.chains.push(c);
            s.active.push(0);
        } else {
            let k = ((-status) as usize).min(dt);
            s.off[k - 1] = 0.0;
        }
        s
    }

    fn step(&mut self, t: usize, on: [f64; 3], off_cost: f64) {
        let g = self.gen;
        let dt = self.dt;

        let mut new_off = vec![f64::INFINITY; dt];
        let mut preds = vec![OffPred::Initial; dt];
        for k in 0..dt {
            let target = (k + 1).min(dt - 1);
            if self.off[k] < new_off[target] {
                new_off[target] = self.off[k];
                preds[target] = OffPred::Off(k);
            }
        }
        let sd_cap = g.shutdown_limit.min(g.p_max);
        for &ci in &self.active {
            let c = &self.chains[ci];
            if c.age < self.ut {
                continue;
            }
            if let Some((p, v)) = c.f.min_on_interval(g.p_min, sd_cap) {
                if v < new_off[0] {
                    new_off[0] = v;
                    preds[0] = OffPred::Shutdown { chain: ci, p };
                }
            }
        }
        for v in new_off.iter_mut().filter(|v| v.is_finite()) {
            *v += off_cost;
        }
        let start_from = self.off[dt - 1];

        let mut still = Vec::with_capacity(self.active.len() + 1);
        for &ci in &self.active {
            let c = &mut self.chains[ci];
            let moved =
                c.f.min_over_window(g.ramp_down, g.ramp_up)
                    .restrict(g.p_min, g.p_max);
            match moved {
                Some(mut f) => {
                    f.add_quadratic(on[0], on[1], on[2]);
                    c.f = f;
                    c.age = (c.age + 1).min(self.ut);
                    c.record();
                    still.push(ci);
                }
                None => c.alive = false,
            }
        }
        let su_cap = g.startup_limit.min(g.p_max);
        if start_from.is_finite() && su_cap >= g.p_min {
            let mut f = PiecewiseQuadratic::quadratic(g.p_min, su_cap, on[0], on[1], on[2]);
            f.add_constant(start_from + g.start_cost);
            let mut c = Chain {
                first: t as i64,
                age: 1,
                f,
                trail: Vec::new(),
                alive: true,
            };
            c.record();
            self.chains.push(c);
            still.push(self.chains.len() - 1);
        }
        self.active = still;
        self.prune();
        self.off = new_off;
        self.off_preds.push(preds);
    }

    fn prune(&mut self) {
        let n = self.active.len();
        if n < 2 {
            return;
        }
        for a in 0..n {
            let i = self.active[a];
            for b in 0..n {
                let j = self.active[b];
                if i == j || !self.chains[j].alive {
                    continue;
                }
                let (ci, cj) = (&self.chains[i], &self.chains[j]);
                if cj.age >= ci.age && ci.f.dominated_by(&cj.f, DOMINANCE_TOL) {
                    self.chains[i].alive = false;
                    break;
                }
            }
        }
        let chains = &self.chains;
        self.active.retain(|&i| chains[i].alive);
    }
}

enum Cursor {
    Off { t: i64, k: usize },
    On { t: i64, chain: usize, p: f64 },
}

/// Solves the single-unit problem exactly.
///
/// `lambda` and `residual` must have one entry per step. Ties between an on
/// and an off ending go to off.
pub fn solve_1uc(
    gen: &GeneratorSpec,
    lambda: &[f64],
    residual: &[f64],
    rho: f64,
) -> Result<UnitSchedule> {
    let horizon = lambda.len();
    if residual.len() != horizon {
        return Err(UcError::Dimension(format!(
            "price has {horizon} steps but residual has {}",
            residual.len()
        )));
    }
    let mut dp = UnitDpState::new(gen);
    for t in 0..horizon {
        let (on, off) = stage_cost_coefficients(gen, lambda[t], residual[t], rho);
        dp.step(t, on, off);
    }

    let mut best: Option<(f64, Cursor)> = None;
    for (k, &v) in dp.off.iter().enumerate() {
        if v.is_finite() && best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((
                v,
                Cursor::Off {
                    t: horizon as i64 - 1,
                    k,
                },
            ));
        }
    }
    for &ci in &dp.active {
        let (p, v) = dp.chains[ci].f.argmin();
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((
                v,
                Cursor::On {
                    t: horizon as i64 - 1,
                    chain: ci,
                    p,
                },
            ));
        }
    }
    let Some((value, mut cur)) = best else {
        return Err(UcError::Infeasible(format!(
            "generator {} has no schedule satisfying its initial status",
            gen.id
        )));
    };

    let mut u = vec![false; horizon];
    let mut p = vec![0.0; horizon];
    loop {
        match cur {
            Cursor::Off { t, k } => {
                if t < 0 {
                    break;
                }
                cur = match dp.off_preds[t as usize][k] {
                    OffPred::Initial => break,
                    OffPred::Off(k) => Cursor::Off { t: t - 1, k },
                    OffPred::Shutdown { chain, p } => Cursor::On { t: t - 1, chain, p },
                };
            }
            Cursor::On { t, chain, p: mut x } => {
                let c = &dp.chains[chain];
                let mut tau = t;
                while tau >= 0 {
                    u[tau as usize] = true;
                    p[tau as usize] = x;
                    let idx = tau - 1 - c.first;
                    if idx < 0 {
                        break;
                    }
                    let (m, lo, hi) = c.trail[idx as usize];
                    x = m
                        .max((x - gen.ramp_up).max(lo))
                        .min((x + gen.ramp_down).min(hi));
                    tau -= 1;
                    if tau < 0 {
                        break;
                    }
                }
                if c.first < 0 || c.first == 0 {
                    break;
                }
                cur = Cursor::Off {
                    t: c.first - 1,
                    k: dp.dt - 1,
                };
            }
        }
    }

    let mut prev = gen.initially_on();
    let mut v = vec![false; horizon];
    let mut w = vec![false; horizon];
    for t in 0..horizon {
        v[t] = u[t] && !prev;
        w[t] = !u[t] && prev;
        prev = u[t];
    }
    Ok(UnitSchedule { u, v, w, p, value })
}
