//! Instances and price signals shared by the benchmarks.

use ucadmm::{generate_synthetic, SyntheticParams, UcInstance};

/// Seeded instance with `gens` units, three nodes, storage and one renewable.
pub fn networked(gens: usize, horizon: usize, seed: u64) -> UcInstance {
    let p = SyntheticParams {
        n_gens: gens,
        n_nodes: 3,
        n_lines: 3,
        n_res: 1,
        n_storage: 1,
        horizon,
        ..Default::default()
    };
    generate_synthetic(&p, seed).expect("synthetic parameters are valid")
}

/// A daily-shaped price and a residual of the same length.
pub fn price_and_residual(horizon: usize) -> (Vec<f64>, Vec<f64>) {
    let price = (0..horizon)
        .map(|t| 20.0 + 10.0 * (std::f64::consts::TAU * t as f64 / 24.0).sin())
        .collect();
    let residual = (0..horizon).map(|t| 40.0 + 5.0 * (t % 7) as f64).collect();
    (price, residual)
}
