//! The full model as one QP, with commitments either fixed or relaxed to [0, 1].

use crate::model::{Schedule, UcInstance};
use crate::qp::QpBuilder;
use crate::{Result, UcError};

/// A commitment quantity: a fixed value or a QP variable.
#[derive(Debug, Clone, Copy)]
enum Bin {
    Fixed(f64),
    Var(usize),
}

#[derive(Default)]
struct Lin {
    terms: Vec<(usize, f64)>,
    k: f64,
}

impl Lin {
    fn var(mut self, i: usize, w: f64) -> Self {
        self.terms.push((i, w));
        self
    }

    fn bin(mut self, b: Bin, w: f64) -> Self {
        match b {
            Bin::Fixed(x) => self.k += w * x,
            Bin::Var(i) => self.terms.push((i, w)),
        }
        self
    }

    fn konst(mut self, w: f64) -> Self {
        self.k += w;
        self
    }
}

fn le0(qp: &mut QpBuilder, l: Lin) {
    qp.le(l.terms, -l.k);
}

fn eq0(qp: &mut QpBuilder, l: Lin) {
    qp.eq(l.terms, -l.k);
}

pub(crate) enum Commitment<'a> {
    Fixed(&'a [Vec<bool>]),
    Relaxed,
}

pub(crate) struct Formulation {
    pub qp: QpBuilder,
    p: Vec<Vec<usize>>,
    res: Vec<Vec<usize>>,
    pc: Vec<Vec<usize>>,
    pd: Vec<Vec<usize>>,
    f: Vec<Vec<usize>>,
    u: Vec<Vec<Bin>>,
    v: Vec<Vec<Bin>>,
    w: Vec<Vec<Bin>>,
}

/// Dispatch decoded from a QP solution, with fractional commitments.
pub(crate) struct Decoded {
    pub schedule: Schedule,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
}

pub(crate) fn formulate(inst: &UcInstance, commitment: Commitment<'_>) -> Formulation {
    let horizon = inst.horizon;
    let topo = inst.topology();
    let mut next = 0usize;
    let mut alloc = |rows: usize| -> Vec<Vec<usize>> {
        (0..rows)
            .map(|_| {
                (0..horizon)
                    .map(|_| {
                        next += 1;
                        next - 1
                    })
                    .collect()
            })
            .collect()
    };
    let g = inst.generators.len();
    let p = alloc(g);
    let res = alloc(inst.renewables.len());
    let pc = alloc(inst.storage.len());
    let pd = alloc(inst.storage.len());
    let pe = alloc(inst.storage.len());
    let f = alloc(inst.lines.len());
    let (u, v, w) = match commitment {
        Commitment::Fixed(fixed) => {
            let mut u = vec![vec![Bin::Fixed(0.0); horizon]; g];
            let mut v = u.clone();
            let mut w = u.clone();
            for (i, gen) in inst.generators.iter().enumerate() {
                let mut prev = gen.initially_on();
                for t in 0..horizon {
                    let on = fixed[i][t];
                    u[i][t] = Bin::Fixed(f64::from(u8::from(on)));
                    v[i][t] = Bin::Fixed(f64::from(u8::from(on && !prev)));
                    w[i][t] = Bin::Fixed(f64::from(u8::from(!on && prev)));
                    prev = on;
                }
            }
            (u, v, w)
        }
        Commitment::Relaxed => {
            let to_bins = |m: Vec<Vec<usize>>| -> Vec<Vec<Bin>> {
                m.into_iter()
                    .map(|r| r.into_iter().map(Bin::Var).collect())
                    .collect()
            };
            let u = to_bins(alloc(g));
            let v = to_bins(alloc(g));
            let w = to_bins(alloc(g));
            (u, v, w)
        }
    };
    let relaxed = matches!(commitment, Commitment::Relaxed);
    let mut qp = QpBuilder::new(next);

    for (i, gen) in inst.generators.iter().enumerate() {
        let u0 = Bin::Fixed(if gen.initially_on() { 1.0 } else { 0.0 });
        let p0 = gen.initial_power();
        let status = gen.initial_status();
        let prior_switch = -status.abs();
        for t in 0..horizon {
            let x = p[i][t];
            qp.square(x, gen.c).linear(x, gen.b);
            match (u[i][t], v[i][t]) {
                (Bin::Fixed(on), Bin::Fixed(start)) => {
                    qp.constant(gen.a * on + gen.start_cost * start);
                    qp.bounds(x, gen.p_min * on, gen.p_max * on);
                }
                (ub, vb) => {
                    let Bin::Var(ui) = ub else { unreachable!() };
                    let Bin::Var(vi) = vb else { unreachable!() };
                    qp.linear(ui, gen.a).linear(vi, gen.start_cost);
                    le0(&mut qp, Lin::default().var(x, 1.0).var(ui, -gen.p_max));
                    le0(&mut qp, Lin::default().var(x, -1.0).var(ui, gen.p_min));
                    qp.bounds(x, 0.0, f64::INFINITY);
                }
            }
            let (u_prev, p_prev) = if t == 0 {
                (u0, Lin::default().konst(p0))
            } else {
                (u[i][t - 1], Lin::default().var(p[i][t - 1], 1.0))
            };
            // ramp up / start-up
            let mut up = Lin::default().var(x, 1.0);
            for &(j, c) in &p_prev.terms {
                up = up.var(j, -c);
            }
            up = up
                .konst(-p_prev.k)
                .bin(v[i][t], -(gen.startup_limit - gen.ramp_up))
                .bin(u[i][t], -gen.ramp_up);
            le0(&mut qp, up);
            // ramp down / shut-down
            let mut down = Lin::default().var(x, -1.0);
            for &(j, c) in &p_prev.terms {
                down = down.var(j, c);
            }
            down = down
                .konst(p_prev.k)
                .bin(w[i][t], -(gen.shutdown_limit - gen.ramp_down))
                .bin(u_prev, -gen.ramp_down);
            le0(&mut qp, down);

            if relaxed {
                for b in [u[i][t], v[i][t], w[i][t]] {
                    if let Bin::Var(j) = b {
                        qp.bounds(j, 0.0, 1.0);
                    }
                }
                le0(
                    &mut qp,
                    Lin::default()
                        .bin(v[i][t], 1.0)
                        .bin(w[i][t], 1.0)
                        .konst(-1.0),
                );
                eq0(
                    &mut qp,
                    Lin::default()
                        .bin(u[i][t], 1.0)
                        .bin(u_prev, -1.0)
                        .bin(v[i][t], -1.0)
                        .bin(w[i][t], 1.0),
                );
                let ti = t as i64;
                let window = |len: u32, flags: &[Bin], initial: bool| -> Lin {
                    let lo = ti - i64::from(len) + 1;
                    let mut l = Lin::default();
                    for tau in lo.max(0)..=ti {
                        l = l.bin(flags[tau as usize], 1.0);
                    }
                    if initial && prior_switch >= lo {
                        l = l.konst(1.0);
                    }
                    l
                };
                le0(
                    &mut qp,
                    window(gen.min_uptime, &v[i], status > 0).bin(u[i][t], -1.0),
                );
                le0(
                    &mut qp,
                    window(gen.min_downtime, &w[i], status < 0)
                        .bin(u[i][t], 1.0)
                        .konst(-1.0),
                );
            }
        }
    }

    for (r, spec) in inst.renewables.iter().enumerate() {
        for t in 0..horizon {
            qp.bounds(res[r][t], 0.0, spec.cap(t));
        }
    }
    for (s, spec) in inst.storage.iter().enumerate() {
        for t in 0..horizon {
            qp.bounds(pc[s][t], 0.0, spec.charge_limit)
                .bounds(pd[s][t], 0.0, spec.discharge_limit)
                .bounds(pe[s][t], spec.energy_min, spec.energy_max);
            let mut row = Lin::default()
                .var(pe[s][t], 1.0)
                .var(pc[s][t], -spec.charge_eff)
                .var(pd[s][t], 1.0 / spec.discharge_eff);
            row = if t == 0 {
                row.konst(-spec.initial_energy())
            } else {
                row.var(pe[s][t - 1], -1.0)
            };
            eq0(&mut qp, row);
        }
    }
    for (l, line) in inst.lines.iter().enumerate() {
        for t in 0..horizon {
            qp.bounds(f[l][t], line.f_min, line.f_max);
        }
    }
    for (n, node) in inst.nodes.iter().enumerate() {
        for t in 0..horizon {
            let mut row = Lin::default().konst(-node.demand[t]);
            for (i, &gn) in topo.gen_node.iter().enumerate() {
                if gn == n {
                    row = row.var(p[i][t], 1.0);
                }
            }
            for (r, &rn) in topo.res_node.iter().enumerate() {
                if rn == n {
                    row = row.var(res[r][t], 1.0);
                }
            }
            for (s, &sn) in topo.storage_node.iter().enumerate() {
                if sn == n {
                    row = row.var(pd[s][t], 1.0).var(pc[s][t], -1.0);
                }
            }
            for &(l, sign) in &topo.node_lines[n] {
                row = row.var(f[l][t], sign);
            }
            eq0(&mut qp, row);
        }
    }

    Formulation {
        qp,
        p,
        res,
        pc,
        pd,
        f,
        u,
        v,
        w,
    }
}

impl Formulation {
    /// Turns a solution vector into a schedule: clamps round-off into the
    /// boxes and recomputes storage energy and injections exactly.
    pub fn decode(&self, inst: &UcInstance, x: &[f64]) -> Decoded {
        let topo = inst.topology();
        let val = |b: Bin| match b {
            Bin::Fixed(v) => v,
            Bin::Var(i) => x[i].clamp(0.0, 1.0),
        };
        let frac = |m: &[Vec<Bin>]| -> Vec<Vec<f64>> {
            m.iter()
                .map(|r| r.iter().map(|&b| val(b)).collect())
                .collect()
        };
        let (u, v, w) = (frac(&self.u), frac(&self.v), frac(&self.w));
        let mut s = Schedule::zeros(inst);
        for (i, gen) in inst.generators.iter().enumerate() {
            for t in 0..inst.horizon {
                let hi = gen.p_max * u[i][t];
                s.p[i][t] = x[self.p[i][t]].clamp(0.0, hi.max(0.0));
                if u[i][t] == 1.0 {
                    s.p[i][t] = s.p[i][t].max(gen.p_min);
                }
                s.u[i][t] = u[i][t] > 0.5;
                s.v[i][t] = v[i][t] > 0.5;
                s.w[i][t] = w[i][t] > 0.5;
            }
        }
        for (r, spec) in inst.renewables.iter().enumerate() {
            for t in 0..inst.horizon {
                s.p_res[r][t] = x[self.res[r][t]].clamp(0.0, spec.cap(t));
            }
        }
        for (k, spec) in inst.storage.iter().enumerate() {
            let mut prev = spec.initial_energy();
            for t in 0..inst.horizon {
                let c = x[self.pc[k][t]].clamp(0.0, spec.charge_limit);
                let d = x[self.pd[k][t]].clamp(0.0, spec.discharge_limit);
                s.pc[k][t] = c;
                s.pd[k][t] = d;
                s.p_st[k][t] = d - c;
                prev += spec.charge_eff * c - d / spec.discharge_eff;
                s.pe[k][t] = prev;
            }
        }
        for (l, line) in inst.lines.iter().enumerate() {
            for t in 0..inst.horizon {
                s.f[l][t] = x[self.f[l][t]].clamp(line.f_min, line.f_max);
            }
        }
        for n in 0..inst.nodes.len() {
            for t in 0..inst.horizon {
                s.inj[n][t] = topo.net_inflow(n, |l| s.f[l][t]);
            }
        }
        Decoded {
            schedule: s,
            u,
            v,
            w,
        }
    }
}

/// Maps a QP failure to an infeasibility message naming `what`.
pub(crate) fn infeasible_as(e: UcError, what: &str) -> UcError {
    match e {
        UcError::Infeasible(_) => UcError::Infeasible(what.to_string()),
        other => other,
    }
}

pub(crate) fn solve(form: &Formulation, what: &str) -> Result<Vec<f64>> {
    form.qp
        .solve()
        .map(|s| s.x)
        .map_err(|e| infeasible_as(e, what))
}
