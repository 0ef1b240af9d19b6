//! Per-step transmission block, solved by an inner ADMM that relaxes the
//! coupling `inj_n = Σ_l sign·f_l` with multipliers `π_n` and penalty `ρ_t`.

/// Data of one step's transmission problem. Node and line vectors are
/// indexed like the instance; `inj`, `f` and `pi` are the warm start.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionStepProblem {
    pub lambda: Vec<f64>,
    pub residual: Vec<f64>,
    pub inj: Vec<f64>,
    pub f: Vec<f64>,
    pub pi: Vec<f64>,
    pub line_from: Vec<usize>,
    pub line_to: Vec<usize>,
    pub f_min: Vec<f64>,
    pub f_max: Vec<f64>,
    pub rho: f64,
    pub rho_trans: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionStepResult {
    pub inj: Vec<f64>,
    pub f: Vec<f64>,
    pub pi: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `max_n |inj_n − Σ_l sign·f_l|` at exit.
    pub coupling_residual: f64,
}

/// Vertex of `−λ·inj + ρ/2 (R − inj)² + π (inj − S) + ρ_t/2 (inj − S)²`.
pub fn injection_update(
    lambda: f64,
    residual: f64,
    pi: f64,
    rho: f64,
    rho_trans: f64,
    sum_f: f64,
) -> f64 {
    (lambda + rho * residual - pi + rho_trans * sum_f) / (rho + rho_trans)
}

/// Minimiser over one line's flow of the inner Lagrangian, clamped to its limits.
///
/// `a_from` and `a_to` are `inj_n` minus the inflow from every other line at
/// the two ends. Positive flow leaves `from` and enters `to`.
pub fn flow_update(
    pi_from: f64,
    pi_to: f64,
    a_from: f64,
    a_to: f64,
    rho_trans: f64,
    f_min: f64,
    f_max: f64,
) -> f64 {
    let f = (pi_to - pi_from + rho_trans * (a_to - a_from)) / (2.0 * rho_trans);
    f.clamp(f_min, f_max)
}

/// `Σ_n −λ_n·inj_n + ρ/2 (R_n − inj_n)²`, the step objective in the injections.
pub fn transmission_objective(lambda: &[f64], residual: &[f64], rho: f64, inj: &[f64]) -> f64 {
    inj.iter()
        .zip(lambda.iter().zip(residual))
        .map(|(&x, (&l, &r))| -l * x + 0.5 * rho * (r - x) * (r - x))
        .sum()
}

fn inflows(p: &TransmissionStepProblem, f: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; p.lambda.len()];
    for (l, &x) in f.iter().enumerate() {
        s[p.line_from[l]] -= x;
        s[p.line_to[l]] += x;
    }
    s
}

/// Runs the inner ADMM until both the coupling residual and the dual
/// residual `ρ_t·max|ΔS|` are at most `inner_tol`.
///
/// Nodes without lines have no way to exchange power and keep `inj = 0`.
/// Lines are swept in ascending index order.
pub fn solve_transmission_step(
    problem: &TransmissionStepProblem,
    inner_tol: f64,
    inner_max_iters: usize,
) -> TransmissionStepResult {
    let p = problem;
    let nodes = p.lambda.len();
    let mut connected = vec![false; nodes];
    for (&a, &b) in p.line_from.iter().zip(&p.line_to) {
        connected[a] = true;
        connected[b] = true;
    }
    let mut inj: Vec<f64> = (0..nodes)
        .map(|n| if connected[n] { p.inj[n] } else { 0.0 })
        .collect();
    let mut pi: Vec<f64> = (0..nodes)
        .map(|n| if connected[n] { p.pi[n] } else { 0.0 })
        .collect();
    let mut f: Vec<f64> = f_clamped(p);
    if p.line_from.is_empty() {
        return TransmissionStepResult {
            inj,
            f,
            pi,
            iterations: 0,
            converged: true,
            coupling_residual: 0.0,
        };
    }

    let rt = p.rho_trans;
    let mut s = inflows(p, &f);
    let mut iterations = 0;
    let mut converged = false;
    let mut primal = f64::INFINITY;
    while iterations < inner_max_iters {
        iterations += 1;
        for n in (0..nodes).filter(|&n| connected[n]) {
            inj[n] = injection_update(p.lambda[n], p.residual[n], pi[n], p.rho, rt, s[n]);
        }
        let s_prev = s.clone();
        for l in 0..f.len() {
            let (a, b) = (p.line_from[l], p.line_to[l]);
            // remove line l from both ends
            let a_from = inj[a] - (s[a] + f[l]);
            let a_to = inj[b] - (s[b] - f[l]);
            let new = flow_update(pi[a], pi[b], a_from, a_to, rt, p.f_min[l], p.f_max[l]);
            s[a] -= new - f[l];
            s[b] += new - f[l];
            f[l] = new;
        }
        primal = 0.0;
        let mut dual: f64 = 0.0;
        for n in (0..nodes).filter(|&n| connected[n]) {
            let r = inj[n] - s[n];
            pi[n] += rt * r;
            primal = primal.max(r.abs());
            dual = dual.max(rt * (s[n] - s_prev[n]).abs());
        }
        if primal <= inner_tol && dual <= inner_tol {
            converged = true;
            break;
        }
    }
    TransmissionStepResult {
        inj,
        f,
        pi,
        iterations,
        converged,
        coupling_residual: primal,
    }
}

fn f_clamped(p: &TransmissionStepProblem) -> Vec<f64> {
    p.f.iter()
        .enumerate()
        .map(|(l, &x)| x.clamp(p.f_min[l], p.f_max[l]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node(residual: [f64; 2], f_max: f64) -> TransmissionStepProblem {
        TransmissionStepProblem {
            lambda: vec![1.0, 1.0],
            residual: residual.to_vec(),
            inj: vec![0.0; 2],
            f: vec![0.0],
            pi: vec![0.0; 2],
            line_from: vec![0],
            line_to: vec![1],
            f_min: vec![-f_max],
            f_max: vec![f_max],
            rho: 1.0,
            rho_trans: 1.0,
        }
    }

    fn grid_argmin(obj: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n)
            .map(|i| lo + i as f64 * h)
            .min_by(|a, b| obj(*a).total_cmp(&obj(*b)))
            .unwrap()
    }

    #[test]
    fn injection_vertex_arithmetic() {
        assert_eq!(injection_update(0.0, 0.0, 0.0, 1.0, 1.0, 0.0), 0.0);
        let x = injection_update(2.0, 3.0, 0.0, 1.0, 1.0, 1.0);
        assert_eq!(x, 3.0);
        let obj = |x: f64| -2.0 * x + 0.5 * (3.0 - x) * (3.0 - x) + 0.5 * (x - 1.0) * (x - 1.0);
        assert!((grid_argmin(obj, -10.0, 10.0, 1e-4) - 3.0).abs() < 1e-4);
        assert!(injection_update(0.0, 0.0, 50.0, 1.0, 1.0, 0.0) < 0.0);
    }

    #[test]
    fn flow_vertex_against_grid() {
        assert_eq!(flow_update(0.0, 0.0, 0.0, 0.0, 1.0, -10.0, 10.0), 0.0);
        let (pf, pt, af, at, rt) = (3.0, -1.0, 2.0, 0.5, 0.7);
        let lag = |f: f64| {
            pt * (at - f)
                + 0.5 * rt * (at - f) * (at - f)
                + pf * (af + f)
                + 0.5 * rt * (af + f) * (af + f)
        };
        let got = flow_update(pf, pt, af, at, rt, -100.0, 100.0);
        assert!((got - grid_argmin(lag, -20.0, 20.0, 1e-5)).abs() < 1e-4);
        assert_eq!(flow_update(pf, pt, af, at, rt, -1.0, 1.0), -1.0);
    }

    #[test]
    fn no_lines_is_immediate() {
        let mut p = two_node([10.0, -10.0], 1.0);
        p.line_from.clear();
        p.line_to.clear();
        p.f.clear();
        p.f_min.clear();
        p.f_max.clear();
        let r = solve_transmission_step(&p, 1e-9, 100);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.inj, vec![0.0, 0.0]);
    }

    #[test]
    fn moves_surplus_to_deficit() {
        // node 1 needs 10 more, node 0 has 10 spare: flow 0 -> 1
        let r = solve_transmission_step(&two_node([-10.0, 10.0], 1e6), 1e-9, 10_000);
        assert!(r.converged);
        assert!((r.f[0] - 10.0).abs() < 1e-4, "{:?}", r);
        assert!((r.inj[1] - 10.0).abs() < 1e-4);
        assert!((r.inj[0] + 10.0).abs() < 1e-4);
    }

    #[test]
    fn flow_limit_binds() {
        let r = solve_transmission_step(&two_node([-10.0, 10.0], 3.0), 1e-9, 10_000);
        assert!(r.converged);
        assert!((r.f[0] - 3.0).abs() < 1e-9);
    }
}
