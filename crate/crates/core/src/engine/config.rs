use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::UcInstance;
use crate::{Result, UcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Blocks updated in turn, each against the freshest iterates.
    #[default]
    GaussSeidel,
    /// All blocks updated against the previous iterate, exchange-style.
    Exchange,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::GaussSeidel => "gauss-seidel",
            Variant::Exchange => "exchange",
        })
    }
}

impl FromStr for Variant {
    type Err = UcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss-seidel" | "gs" => Ok(Variant::GaussSeidel),
            "exchange" => Ok(Variant::Exchange),
            other => Err(UcError::Config(format!(
                "unknown variant `{other}` (expected gauss-seidel or exchange)"
            ))),
        }
    }
}

/// Settings of the outer loop and its subproblems. `None` fields are derived
/// from the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rho0: f64,
    /// Penalty growth factor applied after every `m` sweeps.
    pub alpha: f64,
    pub m: usize,
    /// Tolerance on `Σ|RD|`; defaults to `1e-3 · Σ_t max_n D_nt`.
    pub epsilon: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
    pub variant: Variant,
    /// Range of the uniform initial multipliers; defaults to
    /// `[0, max_g (b + 2 c p_max)]`.
    pub lambda_range: Option<(f64, f64)>,
    /// Inner transmission penalty; defaults to `max(ρ, 1)`.
    pub rho_trans: Option<f64>,
    /// Inner tolerance; defaults to `1e-6 · mean |D|`.
    pub inner_tol: Option<f64>,
    pub inner_max_iters: usize,
    /// Record one trace row per sweep.
    pub trace: bool,
    /// Fill the `ms` trace column with elapsed wall time. Off by default so
    /// that traces are reproducible byte for byte.
    pub timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho0: 1e-4,
            alpha: 1.1,
            m: 1,
            epsilon: None,
            max_iters: 5000,
            seed: 0,
            variant: Variant::GaussSeidel,
            lambda_range: None,
            rho_trans: None,
            inner_tol: None,
            inner_max_iters: 500,
            trace: true,
            timing: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(UcError::Config(m));
        if !(self.rho0.is_finite() && self.rho0 > 0.0) {
            return bad(format!("rho0 must be > 0, got {}", self.rho0));
        }
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return bad(format!("alpha must be >= 1, got {}", self.alpha));
        }
        if self.m < 1 {
            return bad("m must be >= 1".into());
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return bad(format!("epsilon must be > 0, got {e}"));
            }
        }
        if self.max_iters < 1 {
            return bad("max_iters must be >= 1".into());
        }
        if let Some((lo, hi)) = self.lambda_range {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("lambda range [{lo}, {hi}] is empty or not finite"));
            }
        }
        if let Some(r) = self.rho_trans {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("rho_trans must be > 0, got {r}"));
            }
        }
        if let Some(t) = self.inner_tol {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("inner_tol must be > 0, got {t}"));
            }
        }
        if self.inner_max_iters < 1 {
            return bad("inner_max_iters must be >= 1".into());
        }
        Ok(())
    }

    pub fn epsilon_for(&self, inst: &UcInstance) -> f64 {
        self.epsilon.unwrap_or_else(|| {
            let peak_sum: f64 = (0..inst.horizon)
                .map(|t| inst.nodes.iter().map(|n| n.demand[t]).fold(0.0, f64::max))
                .sum();
            let e = 1e-3 * peak_sum;
            if e > 0.0 {
                e
            } else {
                1e-6
            }
        })
    }

    pub fn lambda_range_for(&self, inst: &UcInstance) -> (f64, f64) {
        self.lambda_range.unwrap_or_else(|| {
            let hi = inst
                .generators
                .iter()
                .map(|g| g.b + 2.0 * g.c * g.p_max)
                .fold(0.0, f64::max);
            (0.0, hi)
        })
    }

    pub fn inner_tol_for(&self, inst: &UcInstance) -> f64 {
        self.inner_tol.unwrap_or_else(|| {
            let cells = (inst.nodes.len() * inst.horizon).max(1) as f64;
            let mean: f64 = inst
                .nodes
                .iter()
                .flat_map(|n| n.demand.iter())
                .map(|d| d.abs())
                .sum::<f64>()
                / cells;
            if mean > 0.0 {
                1e-6 * mean
            } else {
                1e-9
            }
        })
    }

    pub fn rho_trans_for(&self, rho: f64) -> f64 {
        self.rho_trans.unwrap_or(rho.max(1.0))
    }
}
