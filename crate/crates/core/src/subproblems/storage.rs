use crate::model::StorageSpec;
use crate::qp::QpBuilder;
use crate::{Result, UcError};

/// Small linear charge on `pc + pd` that breaks ties towards not cycling.
const CYCLE_PENALTY: f64 = 1e-9;
const SNAP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct StorageDispatch {
    pub pc: Vec<f64>,
    pub pd: Vec<f64>,
    pub pe: Vec<f64>,
    pub p_st: Vec<f64>,
}

/// `Σ_t −λ_t p_t + ρ/2 (R_t − p_t)²` for a net storage output series.
pub fn storage_objective(lambda: &[f64], residual: &[f64], rho: f64, p_st: &[f64]) -> f64 {
    p_st.iter()
        .zip(lambda.iter().zip(residual))
        .map(|(&p, (&l, &r))| -l * p + 0.5 * rho * (r - p) * (r - p))
        .sum()
}

/// Best storage schedule against price `lambda` and residual `residual`.
///
/// The QP is solved in the scaled form `½ Σ (pd − pc − y)²` with
/// `y = R + λ/ρ`, which has the same minimiser. The returned point is then
/// clamped into its boxes and `pe` is recomputed forward so that the energy
/// recursion holds exactly. `tol` bounds the energy-limit repair applied to
/// solver round-off.
pub fn storage_dispatch(
    spec: &StorageSpec,
    lambda: &[f64],
    residual: &[f64],
    rho: f64,
    tol: f64,
) -> Result<StorageDispatch> {
    let horizon = lambda.len();
    if residual.len() != horizon {
        return Err(UcError::Dimension(format!(
            "price has {horizon} steps but residual has {}",
            residual.len()
        )));
    }
    if !(rho > 0.0) {
        return Err(UcError::Config(format!(
            "storage penalty must be > 0, got {rho}"
        )));
    }
    if horizon == 0 {
        return Ok(StorageDispatch {
            pc: vec![],
            pd: vec![],
            pe: vec![],
            p_st: vec![],
        });
    }

    // variable layout: pc_t = 3t, pd_t = 3t + 1, pe_t = 3t + 2
    let mut qp = QpBuilder::new(3 * horizon);
    let e0 = spec.initial_energy();
    for t in 0..horizon {
        let (c, d, e) = (3 * t, 3 * t + 1, 3 * t + 2);
        let y = residual[t] + lambda[t] / rho;
        qp.square_of(&[(d, 1.0), (c, -1.0)], -y, 0.5)
            .linear(c, CYCLE_PENALTY)
            .linear(d, CYCLE_PENALTY)
            .bounds(c, 0.0, spec.charge_limit)
            .bounds(d, 0.0, spec.discharge_limit)
            .bounds(e, spec.energy_min, spec.energy_max);
        let mut row = vec![
            (e, 1.0),
            (c, -spec.charge_eff),
            (d, 1.0 / spec.discharge_eff),
        ];
        let rhs = if t == 0 {
            e0
        } else {
            row.push((e - 3, -1.0));
            0.0
        };
        qp.eq(row, rhs);
    }
    let sol = qp.solve().map_err(|e| match e {
        UcError::Infeasible(_) => {
            UcError::Infeasible(format!("storage {} has no feasible schedule", spec.id))
        }
        other => other,
    })?;

    // Keep only the net direction; cycling never gains energy, so netting can
    // only push the level up, and that is repaired below.
    let mut pc = vec![0.0; horizon];
    let mut pd = vec![0.0; horizon];
    for t in 0..horizon {
        let net = sol.x[3 * t + 1] - sol.x[3 * t];
        if net > SNAP * (1.0 + spec.discharge_limit) {
            pd[t] = net.min(spec.discharge_limit);
        } else if -net > SNAP * (1.0 + spec.charge_limit) {
            pc[t] = (-net).min(spec.charge_limit);
        }
    }
    let slack = tol.max(1e-6 * (1.0 + spec.energy_max));
    let mut pe = vec![0.0; horizon];
    let mut prev = e0;
    for t in 0..horizon {
        let mut e = prev + spec.charge_eff * pc[t] - pd[t] / spec.discharge_eff;
        if e > spec.energy_max {
            let excess = e - spec.energy_max;
            if excess > slack && pc[t] == 0.0 {
                return Err(UcError::Qp(format!(
                    "storage {} overshoots its energy limit by {excess}",
                    spec.id
                )));
            }
            pc[t] = (pc[t] - excess / spec.charge_eff).max(0.0);
            e = prev + spec.charge_eff * pc[t] - pd[t] / spec.discharge_eff;
        } else if e < spec.energy_min {
            let deficit = spec.energy_min - e;
            if deficit > slack {
                return Err(UcError::Qp(format!(
                    "storage {} undershoots its energy limit by {deficit}",
                    spec.id
                )));
            }
            pd[t] = (pd[t] - deficit * spec.discharge_eff).max(0.0);
            e = prev + spec.charge_eff * pc[t] - pd[t] / spec.discharge_eff;
        }
        pe[t] = e.clamp(spec.energy_min, spec.energy_max);
        prev = pe[t];
    }
    let p_st = pd.iter().zip(&pc).map(|(d, c)| d - c).collect();
    Ok(StorageDispatch { pc, pd, pe, p_st })
}
