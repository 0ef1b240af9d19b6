use super::{Schedule, UcInstance};
use crate::Result;

/// Generation plus start-up cost of a schedule.
pub fn evaluate_objective(inst: &UcInstance, sched: &Schedule) -> Result<f64> {
    sched.check_dimensions(inst)?;
    let mut total = 0.0;
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..inst.horizon {
            let p = sched.p[g][t];
            if sched.u[g][t] {
                total += gen.a;
            }
            total += gen.b * p + gen.c * p * p;
            if sched.v[g][t] {
                total += gen.start_cost;
            }
        }
    }
    Ok(total)
}

/// Unmet demand per node and step: `D - (thermal + renewable + storage + injection)`.
pub fn residual_demand(inst: &UcInstance, sched: &Schedule) -> Result<Vec<Vec<f64>>> {
    sched.check_dimensions(inst)?;
    let topo = inst.topology();
    let mut rd: Vec<Vec<f64>> = inst.nodes.iter().map(|n| n.demand.clone()).collect();
    for (g, &n) in topo.gen_node.iter().enumerate() {
        for (r, p) in rd[n].iter_mut().zip(&sched.p[g]) {
            *r -= p;
        }
    }
    for (i, &n) in topo.res_node.iter().enumerate() {
        for (r, p) in rd[n].iter_mut().zip(&sched.p_res[i]) {
            *r -= p;
        }
    }
    for (s, &n) in topo.storage_node.iter().enumerate() {
        for (r, p) in rd[n].iter_mut().zip(&sched.p_st[s]) {
            *r -= p;
        }
    }
    for (row, inj) in rd.iter_mut().zip(&sched.inj) {
        for (r, x) in row.iter_mut().zip(inj) {
            *r -= x;
        }
    }
    Ok(rd)
}
