use super::{Schedule, UcInstance};
use crate::Result;

/// Constraint families of the unit commitment model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    MinOutput,
    MaxOutput,
    MinUptime,
    MinDowntime,
    RampUp,
    RampDown,
    /// `u_t - u_{t-1} = v_t - w_t`
    CommitmentLogic,
    /// `v_t + w_t <= 1`
    StartStopExclusive,
    RenewableLimit,
    ChargeLimit,
    DischargeLimit,
    /// `p_st = pd - pc`
    StorageNet,
    EnergyLimit,
    /// `pe_t = pe_{t-1} + eta_c pc_t - pd_t / eta_d`
    EnergyBalance,
    /// Injection equals the net line inflow.
    Injection,
    FlowLimit,
    NodalBalance,
}

/// A constraint instance whose residual exceeds the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// Index of the generator, renewable, storage unit, node or line.
    pub index: usize,
    pub t: usize,
    pub magnitude: f64,
}

impl Violation {
    pub fn is_balance(&self) -> bool {
        self.constraint == Constraint::NodalBalance
    }
}

struct Collector {
    tol: f64,
    out: Vec<Violation>,
}

impl Collector {
    /// Records `lhs <= rhs` when violated by more than `tol`.
    fn le(&mut self, constraint: Constraint, index: usize, t: usize, lhs: f64, rhs: f64) {
        let excess = lhs - rhs;
        if excess > self.tol || excess.is_nan() {
            self.out.push(Violation {
                constraint,
                index,
                t,
                magnitude: excess,
            });
        }
    }

    fn eq(&mut self, constraint: Constraint, index: usize, t: usize, lhs: f64, rhs: f64) {
        let gap = (lhs - rhs).abs();
        if gap > self.tol || gap.is_nan() {
            self.out.push(Violation {
                constraint,
                index,
                t,
                magnitude: gap,
            });
        }
    }
}

fn b(x: bool) -> f64 {
    if x {
        1.0
    } else {
        0.0
    }
}

/// Lists every constraint whose residual exceeds `tol`.
///
/// The step before the horizon is taken from each generator's initial status
/// and initial power, so ramping, start-up and shut-down limits also bind the
/// first step.
pub fn check_feasibility(inst: &UcInstance, sched: &Schedule, tol: f64) -> Result<Vec<Violation>> {
    sched.check_dimensions(inst)?;
    let topo = inst.topology();
    let horizon = inst.horizon;
    let mut c = Collector {
        tol,
        out: Vec::new(),
    };

    for (g, gen) in inst.generators.iter().enumerate() {
        let (u, v, w, p) = (&sched.u[g], &sched.v[g], &sched.w[g], &sched.p[g]);
        let status = gen.initial_status();
        // Step (0-based, possibly negative) of the last start or stop before the horizon.
        let prior_switch = -status.abs();
        let ut = i64::from(gen.min_uptime);
        let dt = i64::from(gen.min_downtime);
        for t in 0..horizon {
            let (u_prev, p_prev) = if t == 0 {
                (gen.initially_on(), gen.initial_power())
            } else {
                (u[t - 1], p[t - 1])
            };
            c.le(Constraint::MinOutput, g, t, b(u[t]) * gen.p_min, p[t]);
            c.le(Constraint::MaxOutput, g, t, p[t], b(u[t]) * gen.p_max);

            let ti = t as i64;
            let window = |len: i64, flags: &[bool], initial: bool| -> f64 {
                let lo = ti - len + 1;
                let mut sum: f64 = (lo.max(0)..=ti).map(|i| b(flags[i as usize])).sum();
                if initial && prior_switch >= lo {
                    sum += 1.0;
                }
                sum
            };
            c.le(
                Constraint::MinUptime,
                g,
                t,
                window(ut, v, status > 0),
                b(u[t]),
            );
            c.le(
                Constraint::MinDowntime,
                g,
                t,
                window(dt, w, status < 0),
                1.0 - b(u[t]),
            );

            c.le(
                Constraint::RampUp,
                g,
                t,
                p[t] - p_prev,
                (gen.startup_limit - gen.ramp_up) * b(v[t]) + gen.ramp_up * b(u[t]),
            );
            c.le(
                Constraint::RampDown,
                g,
                t,
                p_prev - p[t],
                (gen.shutdown_limit - gen.ramp_down) * b(w[t]) + gen.ramp_down * b(u_prev),
            );
            c.eq(
                Constraint::CommitmentLogic,
                g,
                t,
                b(u[t]) - b(u_prev),
                b(v[t]) - b(w[t]),
            );
            c.le(Constraint::StartStopExclusive, g, t, b(v[t]) + b(w[t]), 1.0);
        }
    }

    for (r, res) in inst.renewables.iter().enumerate() {
        for t in 0..horizon {
            let x = sched.p_res[r][t];
            c.le(Constraint::RenewableLimit, r, t, x, res.cap(t));
            c.le(Constraint::RenewableLimit, r, t, 0.0, x);
        }
    }

    for (s, st) in inst.storage.iter().enumerate() {
        let mut e_prev = st.initial_energy();
        for t in 0..horizon {
            let (pc, pd, pe) = (sched.pc[s][t], sched.pd[s][t], sched.pe[s][t]);
            c.le(Constraint::ChargeLimit, s, t, 0.0, pc);
            c.le(Constraint::ChargeLimit, s, t, pc, st.charge_limit);
            c.le(Constraint::DischargeLimit, s, t, 0.0, pd);
            c.le(Constraint::DischargeLimit, s, t, pd, st.discharge_limit);
            c.eq(Constraint::StorageNet, s, t, sched.p_st[s][t], pd - pc);
            c.le(Constraint::EnergyLimit, s, t, st.energy_min, pe);
            c.le(Constraint::EnergyLimit, s, t, pe, st.energy_max);
            c.eq(
                Constraint::EnergyBalance,
                s,
                t,
                pe,
                e_prev + pc * st.charge_eff - pd / st.discharge_eff,
            );
            e_prev = pe;
        }
    }

    for (l, line) in inst.lines.iter().enumerate() {
        for t in 0..horizon {
            let f = sched.f[l][t];
            c.le(Constraint::FlowLimit, l, t, line.f_min, f);
            c.le(Constraint::FlowLimit, l, t, f, line.f_max);
        }
    }
    for n in 0..inst.nodes.len() {
        for t in 0..horizon {
            let inflow = topo.net_inflow(n, |l| sched.f[l][t]);
            c.eq(Constraint::Injection, n, t, sched.inj[n][t], inflow);
        }
    }

    let rd = super::residual_demand(inst, sched)?;
    for (n, row) in rd.iter().enumerate() {
        for (t, &x) in row.iter().enumerate() {
            c.eq(Constraint::NodalBalance, n, t, x, 0.0);
        }
    }
    Ok(c.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{generator, single_node};

    fn on_schedule(inst: &UcInstance, p: &[f64]) -> Schedule {
        let mut s = Schedule::zeros(inst);
        for (t, &x) in p.iter().enumerate() {
            s.u[0][t] = x > 0.0;
            s.p[0][t] = x;
            let prev = t > 0 && p[t - 1] > 0.0;
            s.v[0][t] = x > 0.0 && !prev;
            s.w[0][t] = x == 0.0 && prev;
        }
        s
    }

    #[test]
    fn balanced_feasible_schedule_has_no_violations() {
        let inst = single_node(vec![50.0, 90.0, 40.0], vec![generator("g0")]);
        let s = on_schedule(&inst, &[50.0, 90.0, 40.0]);
        assert!(check_feasibility(&inst, &s, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn output_above_max_is_flagged_with_magnitude() {
        let mut g = generator("g0");
        g.startup_limit = 200.0;
        g.ramp_up = 200.0;
        let inst = single_node(vec![101.0], vec![g]);
        let s = on_schedule(&inst, &[101.0]);
        let v = check_feasibility(&inst, &s, 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, Constraint::MaxOutput);
        assert!((v[0].magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shutdown_above_limit_is_flagged() {
        let mut g = generator("g0");
        g.shutdown_limit = 40.0;
        let inst = single_node(vec![45.0, 0.0], vec![g]);
        let s = on_schedule(&inst, &[45.0, 0.0]);
        let v = check_feasibility(&inst, &s, 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, Constraint::RampDown);
        assert_eq!(v[0].t, 1);
        assert!((v[0].magnitude - 5.0).abs() < 1e-12);
    }

    #[test]
    fn minimum_uptime_respects_initial_status() {
        let mut g = generator("g0");
        g.min_uptime = 3;
        g.initial_status = Some(1);
        g.initial_power = Some(20.0);
        let inst = single_node(vec![0.0, 0.0], vec![g]);
        let s = on_schedule(&inst, &[0.0, 0.0]);
        let mut s = s;
        s.w[0][0] = true;
        let v = check_feasibility(&inst, &s, 1e-6).unwrap();
        assert!(v
            .iter()
            .any(|x| x.constraint == Constraint::MinUptime && x.t == 0));
    }

    #[test]
    fn imbalance_is_reported_per_node_and_step() {
        let inst = single_node(vec![50.0, 50.0], vec![generator("g0")]);
        let s = on_schedule(&inst, &[50.0, 45.0]);
        let v = check_feasibility(&inst, &s, 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].is_balance());
        assert_eq!(v[0].t, 1);
    }
}
