//! Whole-solver properties: per-unit feasibility at every sweep, the penalty
//! trajectory, determinism and the convex limit.

use proptest::prelude::*;
use ucadmm::model::check_feasibility;
use ucadmm::oracle::solve_convexified;
use ucadmm::{
    generate_synthetic, run_increasing_rho, run_increasing_rho_observed, DemandProfile,
    GeneratorSpec, NodeSpec, SolverConfig, SyntheticParams, UcInstance, Variant,
};

fn params() -> impl Strategy<Value = SyntheticParams> {
    (
        1usize..5,
        1usize..4,
        0usize..3,
        0usize..2,
        0usize..2,
        2usize..10,
        0u8..3,
    )
        .prop_map(|(g, n, l, r, s, t, profile)| SyntheticParams {
            n_gens: g,
            n_nodes: n,
            n_lines: if n > 1 { l } else { 0 },
            n_res: r,
            n_storage: s,
            horizon: t,
            profile: [
                DemandProfile::Flat,
                DemandProfile::Daily,
                DemandProfile::Random,
            ][profile as usize],
        })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::GaussSeidel), Just(Variant::Exchange)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn only_balance_is_ever_violated(p in params(), seed in 0u64..1000, v in variant()) {
        let inst = generate_synthetic(&p, seed).unwrap();
        let config = SolverConfig { max_iters: 150, seed, variant: v, ..Default::default() };
        let mut bad = Vec::new();
        let r = run_increasing_rho_observed(&inst, &config, |inst, state| {
            bad.extend(
                check_feasibility(inst, &state.schedule, 1e-6)
                    .unwrap()
                    .into_iter()
                    .filter(|x| !x.is_balance()),
            );
        })
        .unwrap();
        prop_assert!(bad.is_empty(), "{:?}", bad.first());
        if r.converged {
            prop_assert!(r.rd_l1 <= r.epsilon);
        }
    }

    #[test]
    fn penalty_is_geometric_in_blocks(alpha in 1.0f64..1.5, m in 1usize..5, rho0 in 1e-5f64..1.0) {
        let inst = generate_synthetic(&SyntheticParams { horizon: 4, ..Default::default() }, 1).unwrap();
        let config = SolverConfig {
            alpha,
            m,
            rho0,
            max_iters: 40,
            epsilon: Some(f64::MIN_POSITIVE),
            trace: true,
            ..Default::default()
        };
        let r = run_increasing_rho(&inst, &config).unwrap();
        for rec in &r.trace {
            let expect = rho0 * alpha.powi(((rec.k - 1) / m) as i32);
            prop_assert!((rec.rho - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn same_seed_same_trace(p in params(), seed in 0u64..1000, v in variant()) {
        let inst = generate_synthetic(&p, seed).unwrap();
        let config = SolverConfig { max_iters: 60, seed, variant: v, trace: true, ..Default::default() };
        let a = run_increasing_rho(&inst, &config).unwrap();
        let b = run_increasing_rho(&inst, &config).unwrap();
        prop_assert_eq!(a.trace, b.trace);
        prop_assert_eq!(a.schedule, b.schedule);
    }
}

fn convex_instance(seed: u64) -> UcInstance {
    let p = SyntheticParams {
        n_gens: 4,
        n_nodes: 2,
        n_lines: 1,
        n_storage: 1,
        horizon: 6,
        ..Default::default()
    };
    let mut inst = generate_synthetic(&p, seed).unwrap();
    for g in &mut inst.generators {
        g.p_min = 0.0;
        g.a = 0.0;
        g.start_cost = 0.0;
        // a start-up may not jump further than a ramp, or staying on at zero
        // would not dominate switching off
        g.startup_limit = g.startup_limit.min(g.ramp_up);
        g.shutdown_limit = g.shutdown_limit.min(g.ramp_down);
    }
    inst
}

#[test]
fn both_variants_reach_the_convex_optimum() {
    for seed in 0..3 {
        let inst = convex_instance(seed);
        let target = solve_convexified(&inst).unwrap().objective;
        for variant in [Variant::GaussSeidel, Variant::Exchange] {
            let config = SolverConfig {
                rho0: 1e-2,
                alpha: 1.0,
                max_iters: 3000,
                epsilon: Some(1e-6),
                variant,
                ..Default::default()
            };
            let r = run_increasing_rho(&inst, &config).unwrap();
            assert!(r.converged, "{variant} seed {seed}: residual {}", r.rd_l1);
            let gap = (r.objective - target).abs() / target;
            assert!(
                gap < 1e-4,
                "{variant} seed {seed}: {} vs {target}",
                r.objective
            );
        }
    }
}

#[test]
fn exchange_keeps_identical_units_identical() {
    let unit = |id: &str| GeneratorSpec {
        id: id.into(),
        node: "n0".into(),
        p_min: 10.0,
        p_max: 100.0,
        a: 10.0,
        b: 2.0,
        c: 0.01,
        start_cost: 40.0,
        ramp_up: 50.0,
        ramp_down: 50.0,
        startup_limit: 60.0,
        shutdown_limit: 60.0,
        min_uptime: 1,
        min_downtime: 1,
        initial_status: None,
        initial_power: None,
    };
    let inst = UcInstance {
        horizon: 3,
        nodes: vec![NodeSpec {
            id: "n0".into(),
            demand: vec![80.0, 100.0, 60.0],
        }],
        generators: vec![unit("a"), unit("b")],
        renewables: vec![],
        storage: vec![],
        lines: vec![],
    };
    let config = SolverConfig {
        variant: Variant::Exchange,
        ..Default::default()
    };
    let r = run_increasing_rho_observed(&inst, &config, |_, state| {
        let s = &state.schedule;
        assert_eq!(s.u[0], s.u[1], "sweep {}", state.k);
        assert_eq!(s.p[0], s.p[1], "sweep {}", state.k);
    })
    .unwrap();
    assert!(r.converged);
    // the symmetric point splits demand evenly
    for t in 0..3 {
        let d = inst.nodes[0].demand[t];
        assert!((r.schedule.p[0][t] - d / 2.0).abs() <= r.epsilon);
    }
}

#[test]
fn horizon_of_one_converges() {
    let inst = generate_synthetic(
        &SyntheticParams {
            horizon: 1,
            ..Default::default()
        },
        3,
    )
    .unwrap();
    let r = run_increasing_rho(&inst, &SolverConfig::default()).unwrap();
    assert!(r.converged);
}
