//! Thin builder over clarabel for small sparse convex QPs.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::{Result, UcError};

/// `min ½xᵀPx + qᵀx + k` subject to linear equalities and `≤` rows.
#[derive(Debug, Clone, Default)]
pub struct QpBuilder {
    n: usize,
    p: Vec<(usize, usize, f64)>,
    q: Vec<f64>,
    constant: f64,
    eq: Vec<(Vec<(usize, f64)>, f64)>,
    le: Vec<(Vec<(usize, f64)>, f64)>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl QpBuilder {
    pub fn new(n: usize) -> Self {
        QpBuilder {
            n,
            q: vec![0.0; n],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Adds `w · x_i²`.
    pub fn square(&mut self, i: usize, w: f64) -> &mut Self {
        self.p.push((i, i, 2.0 * w));
        self
    }

    /// Adds `w · x_i · x_j` for `i != j`.
    pub fn cross(&mut self, i: usize, j: usize, w: f64) -> &mut Self {
        debug_assert_ne!(i, j);
        self.p.push((i.min(j), i.max(j), w));
        self
    }

    /// Adds `w · (Σ c_k x_k + d)²`.
    pub fn square_of(&mut self, terms: &[(usize, f64)], d: f64, w: f64) -> &mut Self {
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.square(i, w * ci * ci);
            for &(j, cj) in &terms[a + 1..] {
                if i == j {
                    self.square(i, 2.0 * w * ci * cj);
                } else {
                    self.cross(i, j, 2.0 * w * ci * cj);
                }
            }
            self.linear(i, 2.0 * w * ci * d);
        }
        self.constant += w * d * d;
        self
    }

    pub fn linear(&mut self, i: usize, w: f64) -> &mut Self {
        self.q[i] += w;
        self
    }

    pub fn constant(&mut self, k: f64) -> &mut Self {
        self.constant += k;
        self
    }

    pub fn eq(&mut self, row: Vec<(usize, f64)>, rhs: f64) -> &mut Self {
        self.eq.push((row, rhs));
        self
    }

    pub fn le(&mut self, row: Vec<(usize, f64)>, rhs: f64) -> &mut Self {
        self.le.push((row, rhs));
        self
    }

    pub fn bounds(&mut self, i: usize, lo: f64, hi: f64) -> &mut Self {
        if lo == hi {
            return self.eq(vec![(i, 1.0)], lo);
        }
        if lo.is_finite() {
            self.le(vec![(i, -1.0)], -lo);
        }
        if hi.is_finite() {
            self.le(vec![(i, 1.0)], hi);
        }
        self
    }

    /// Objective value at `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for &(i, j, w) in &self.p {
            v += if i == j {
                0.5 * w * x[i] * x[i]
            } else {
                w * x[i] * x[j]
            };
        }
        v + self.q.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Largest constraint violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[(usize, f64)]| row.iter().map(|&(j, w)| w * x[j]).sum::<f64>();
        let eq = self.eq.iter().map(|(r, b)| (dot(r) - b).abs());
        let le = self.le.iter().map(|(r, b)| (dot(r) - b).max(0.0));
        eq.chain(le).fold(0.0, f64::max)
    }

    pub fn solve(&self) -> Result<QpSolution> {
        let n = self.n;
        let (pi, pj, pv) = split3(&self.p);
        let p = CscMatrix::new_from_triplets(n, n, pi, pj, pv);

        let mut ai = Vec::new();
        let mut aj = Vec::new();
        let mut av = Vec::new();
        let mut b = Vec::with_capacity(self.eq.len() + self.le.len());
        for (r, (row, rhs)) in self.eq.iter().chain(&self.le).enumerate() {
            for &(j, w) in row {
                ai.push(r);
                aj.push(j);
                av.push(w);
            }
            b.push(*rhs);
        }
        let m = b.len();
        let a = CscMatrix::new_from_triplets(m, n, ai, aj, av);
        let mut cones = Vec::new();
        if !self.eq.is_empty() {
            cones.push(SupportedConeT::ZeroConeT(self.eq.len()));
        }
        if !self.le.is_empty() {
            cones.push(SupportedConeT::NonnegativeConeT(self.le.len()));
        }

        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(400)
            .tol_gap_abs(1e-13)
            .tol_gap_rel(1e-13)
            .tol_feas(1e-12)
            .build()
            .map_err(|e| UcError::Qp(e.to_string()))?;
        let mut solver = DefaultSolver::new(&p, &self.q, &a, &b, &cones, settings)
            .map_err(|e| UcError::Qp(e.to_string()))?;
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {}
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                return Err(UcError::Infeasible("QP constraints cannot be met".into()))
            }
            // tight tolerances can stall just short of the target; keep the
            // iterate if it is feasible
            SolverStatus::MaxIterations | SolverStatus::InsufficientProgress
                if self.max_violation(&solver.solution.x) <= 1e-7 => {}
            s => return Err(UcError::Qp(format!("solver stopped with status {s:?}"))),
        }
        let x = solver.solution.x.clone();
        Ok(QpSolution {
            objective: self.objective(&x),
            x,
        })
    }
}

fn split3(t: &[(usize, usize, f64)]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let mut a = Vec::with_capacity(t.len());
    let mut b = Vec::with_capacity(t.len());
    let mut c = Vec::with_capacity(t.len());
    for &(i, j, v) in t {
        a.push(i);
        b.push(j);
        c.push(v);
    }
    (a, b, c)
}
