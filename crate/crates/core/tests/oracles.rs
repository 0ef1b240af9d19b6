//! Reference solvers checked against each other and against sampling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucadmm::model::check_feasibility;
use ucadmm::oracle::{
    dispatch_given_commitment, solve_convexified, solve_exact_tiny, unit_commitment_patterns,
};
use ucadmm::{generate_synthetic, RenewableSpec, SyntheticParams, UcError, UcInstance};

fn tiny(seed: u64, horizon: usize, storage: usize) -> UcInstance {
    let p = SyntheticParams {
        n_gens: 3,
        horizon,
        n_storage: storage,
        ..Default::default()
    };
    generate_synthetic(&p, seed).unwrap()
}

#[test]
fn exact_beats_random_commitments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..3 {
        let inst = tiny(seed, 6, 0);
        let exact = solve_exact_tiny(&inst).unwrap();
        assert!(check_feasibility(&inst, &exact.schedule, 1e-6)
            .unwrap()
            .is_empty());
        let patterns: Vec<Vec<Vec<bool>>> = inst
            .generators
            .iter()
            .map(|g| unit_commitment_patterns(g, inst.horizon))
            .collect();
        let mut sampled = 0;
        while sampled < 100 {
            let u: Vec<Vec<bool>> = patterns
                .iter()
                .map(|p| p.choose(&mut rng).unwrap().clone())
                .collect();
            match dispatch_given_commitment(&inst, &u) {
                Ok((s, cost)) => {
                    assert!(check_feasibility(&inst, &s, 1e-6).unwrap().is_empty());
                    assert!(
                        exact.objective <= cost + 1e-6 * cost.abs(),
                        "{} > {cost}",
                        exact.objective
                    );
                    sampled += 1;
                }
                Err(UcError::Infeasible(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn relaxation_bounds_exact_from_below() {
    for seed in 0..6 {
        let inst = tiny(100 + seed, 6, (seed % 2) as usize);
        let relaxed = solve_convexified(&inst).unwrap();
        let exact = solve_exact_tiny(&inst).unwrap();
        assert!(
            relaxed.objective <= exact.objective * (1.0 + 1e-7),
            "{} > {}",
            relaxed.objective,
            exact.objective
        );
    }
}

#[test]
fn relaxation_is_tight_without_fixed_costs() {
    for seed in 0..3 {
        let mut inst = tiny(200 + seed, 5, 0);
        for g in &mut inst.generators {
            g.p_min = 0.0;
            g.a = 0.0;
            g.start_cost = 0.0;
        }
        let relaxed = solve_convexified(&inst).unwrap();
        let exact = solve_exact_tiny(&inst).unwrap();
        let rel = (relaxed.objective - exact.objective).abs() / exact.objective;
        assert!(rel < 1e-5, "{} vs {}", relaxed.objective, exact.objective);
    }
}

#[test]
fn zero_demand_relaxes_to_zero_cost() {
    let mut inst = tiny(3, 4, 0);
    for g in &mut inst.generators {
        g.initial_status = None;
        g.initial_power = None;
    }
    for n in &mut inst.nodes {
        n.demand.iter_mut().for_each(|d| *d = 0.0);
    }
    assert!(solve_convexified(&inst).unwrap().objective.abs() < 1e-6);
    assert!(solve_exact_tiny(&inst).unwrap().objective.abs() < 1e-9);
}

#[test]
fn expensive_units_stay_off_when_renewables_cover_demand() {
    let mut inst = tiny(4, 4, 0);
    for g in &mut inst.generators {
        g.initial_status = None;
        g.initial_power = None;
        g.a = 1e6;
    }
    for n in &mut inst.nodes {
        n.demand.iter_mut().for_each(|d| *d = 5.0);
    }
    inst.renewables.push(RenewableSpec {
        id: "wind".into(),
        node: inst.nodes[0].id.clone(),
        p_max: 10.0,
        availability: vec![1.0; 4],
    });
    let exact = solve_exact_tiny(&inst).unwrap();
    assert!(exact.schedule.u.iter().flatten().all(|&on| !on));
    assert_eq!(exact.objective, 0.0);
}

#[test]
fn dispatch_matches_grid_search_on_one_step() {
    // two units, one step: minimise over a fine grid of the split
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut inst = tiny(rng.gen_range(0..1000), 1, 0);
        inst.generators.truncate(2);
        for g in &mut inst.generators {
            g.initial_status = Some(i64::from(g.min_uptime));
            g.initial_power = Some(0.5 * (g.p_min + g.p_max));
            g.ramp_up = g.p_max;
            g.ramp_down = g.p_max;
            g.shutdown_limit = g.p_max;
        }
        let (a, b) = (&inst.generators[0], &inst.generators[1]);
        let demand =
            (a.p_min + b.p_min) + rng.gen_range(0.0..1.0) * (a.p_max + b.p_max - a.p_min - b.p_min);
        inst.nodes[0].demand = vec![demand];
        let (_, cost) = dispatch_given_commitment(&inst, &[vec![true], vec![true]]).unwrap();
        let mut best = f64::INFINITY;
        let n = 200_000;
        for i in 0..=n {
            let pa = a.p_min + (a.p_max - a.p_min) * i as f64 / n as f64;
            let pb = demand - pa;
            if pb < b.p_min || pb > b.p_max {
                continue;
            }
            let c = a.a + a.b * pa + a.c * pa * pa + b.a + b.b * pb + b.c * pb * pb;
            best = best.min(c);
        }
        // the grid only over-estimates, by at most its step times the slope
        assert!(
            cost <= best + 1e-9 * best && best - cost <= 1e-5 * best,
            "{cost} vs {best}"
        );
    }
}

#[test]
fn exact_handles_storage_and_lines() {
    let p = SyntheticParams {
        n_gens: 3,
        n_nodes: 2,
        n_lines: 1,
        n_storage: 1,
        n_res: 1,
        horizon: 5,
        ..Default::default()
    };
    let inst = generate_synthetic(&p, 9).unwrap();
    let exact = solve_exact_tiny(&inst).unwrap();
    assert!(check_feasibility(&inst, &exact.schedule, 1e-6)
        .unwrap()
        .is_empty());
    assert!(solve_convexified(&inst).unwrap().objective <= exact.objective * (1.0 + 1e-7));
}
