//! ADMM against the exact optimum on tiny instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use rayon::prelude::*;
use ucadmm::oracle::{assess, solve_exact_tiny};
use ucadmm::{run_increasing_rho, UcError, UcInstance, Variant};

use crate::{load, SolverFlags};

#[derive(Args)]
pub struct CompareArgs {
    /// Instance file, or a directory whose `.json` files are all compared.
    #[arg(long)]
    instance: PathBuf,
    /// Runs per setting, with seeds 0..K.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, value_delimiter = ',', default_value = "1.01,1.05,1.1,1.2")]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "gauss-seidel")]
    variants: Vec<Variant>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Print one line per run as well as the aggregates.
    #[arg(long)]
    verbose: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

struct Run {
    instance: usize,
    variant: Variant,
    alpha: f64,
    seed: u64,
    converged: bool,
    iterations: usize,
    gap: f64,
    dispatchable: bool,
}

fn instance_paths(path: &Path) -> Result<Vec<PathBuf>, UcError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(path)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    out.retain(|p| p.extension().is_some_and(|x| x == "json"));
    out.sort();
    if out.is_empty() {
        return Err(UcError::Config(format!(
            "no .json instances in {}",
            path.display()
        )));
    }
    Ok(out)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn run_compare(args: &CompareArgs) -> Result<ExitCode, UcError> {
    if args.seeds == 0 || args.alphas.is_empty() || args.variants.is_empty() {
        return Err(UcError::Config(
            "need at least one seed, alpha and variant".into(),
        ));
    }
    let paths = instance_paths(&args.instance)?;
    let instances: Vec<UcInstance> = paths
        .iter()
        .map(|p| load(p, args.horizon))
        .collect::<Result<_, _>>()?;
    let optima: Vec<f64> = instances
        .par_iter()
        .map(|inst| match solve_exact_tiny(inst) {
            Ok(s) => Ok(s.objective),
            Err(UcError::BudgetExceeded(m)) => Err(UcError::BudgetExceeded(format!(
                "{m}; try a smaller instance or --horizon"
            ))),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;

    let mut jobs = Vec::new();
    for &variant in &args.variants {
        for &alpha in &args.alphas {
            for instance in 0..instances.len() {
                for seed in 0..args.seeds {
                    jobs.push((instance, variant, alpha, seed));
                }
            }
        }
    }
    let runs: Vec<Run> = jobs
        .par_iter()
        .map(|&(instance, variant, alpha, seed)| {
            let inst = &instances[instance];
            let config = args.solver.config(alpha, seed, variant)?;
            let r = run_increasing_rho(inst, &config)?;
            let a = assess(inst, &r.schedule)?;
            Ok(Run {
                instance,
                variant,
                alpha,
                seed,
                converged: r.converged,
                iterations: r.iterations,
                gap: a.gap_percent(optima[instance]),
                dispatchable: a.redispatched.is_some(),
            })
        })
        .collect::<Result<_, UcError>>()?;

    if args.verbose {
        println!("instance,variant,alpha,seed,converged,iterations,gap_pct,dispatchable");
        for r in &runs {
            println!(
                "{},{},{},{},{},{},{:.6},{}",
                paths[r.instance].display(),
                r.variant,
                r.alpha,
                r.seed,
                r.converged,
                r.iterations,
                r.gap,
                r.dispatchable
            );
        }
    }
    println!(
        "{:<13} {:>6} {:>5} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "variant",
        "alpha",
        "runs",
        "conv",
        "iters",
        "gap_mean",
        "gap_med",
        "gap_min",
        "gap_max",
        "undisp"
    );
    for group in runs.chunk_by(|a, b| a.variant == b.variant && a.alpha == b.alpha) {
        let n = group.len() as f64;
        let mut gaps: Vec<f64> = group.iter().map(|r| r.gap).collect();
        gaps.sort_by(f64::total_cmp);
        println!(
            "{:<13} {:>6} {:>5} {:>5} {:>9.1} {:>8.4}% {:>8.4}% {:>8.4}% {:>8.4}% {:>6}",
            group[0].variant.to_string(),
            group[0].alpha,
            group.len(),
            group.iter().filter(|r| r.converged).count(),
            group.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
            gaps.iter().sum::<f64>() / n,
            median(&gaps),
            gaps[0],
            gaps[gaps.len() - 1],
            group.iter().filter(|r| !r.dispatchable).count()
        );
    }
    Ok(ExitCode::SUCCESS)
}
