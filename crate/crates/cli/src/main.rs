use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ucadmm::io::{load_instance_path, save_instance, save_results};
use ucadmm::{
    generate_synthetic, run_increasing_rho, DemandProfile, SolverConfig, SyntheticParams, UcError,
    UcInstance, Variant,
};

mod compare;

#[derive(Parser)]
#[command(
    name = "ucadmm",
    version,
    about = "Unit commitment by ADMM with an increasing penalty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the schedule and convergence trace.
    Solve(SolveArgs),
    /// Compare ADMM runs against the exact optimum of tiny instances.
    Compare(compare::CompareArgs),
    /// Write seeded synthetic instances.
    Generate(GenerateArgs),
}

/// Solver flags shared by `solve` and `compare`.
#[derive(Args, Clone)]
pub struct SolverFlags {
    /// Initial penalty.
    #[arg(long, default_value_t = 1e-4)]
    rho0: f64,
    /// Sweeps between penalty increases.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Stop when the L1 residual demand falls to this (default 1e-3 of summed peak demand).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Penalty of the inner transmission problem (default max(rho, 1)).
    #[arg(long)]
    rho_trans: Option<f64>,
    /// Stopping tolerance of the inner transmission problem.
    #[arg(long)]
    inner_tol: Option<f64>,
}

impl SolverFlags {
    pub fn config(&self, alpha: f64, seed: u64, variant: Variant) -> Result<SolverConfig, UcError> {
        let config = SolverConfig {
            rho0: self.rho0,
            alpha,
            m: self.m,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            seed,
            variant,
            rho_trans: self.rho_trans,
            inner_tol: self.inner_tol,
            trace: true,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Penalty growth factor, at least 1.
    #[arg(long, default_value_t = 1.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Variant::GaussSeidel)]
    variant: Variant,
    /// Keep only the first K steps of every series.
    #[arg(long)]
    horizon: Option<usize>,
    /// Trace CSV path.
    #[arg(long, default_value = "trace.csv")]
    trace: PathBuf,
    /// Schedule JSON path.
    #[arg(long, default_value = "schedule.json")]
    out: PathBuf,
    /// Record wall-clock milliseconds in the trace (makes it run-dependent).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 3)]
    gens: usize,
    #[arg(long, default_value_t = 1)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    lines: usize,
    #[arg(long, default_value_t = 0)]
    res: usize,
    #[arg(long, default_value_t = 0)]
    storage: usize,
    #[arg(long, default_value_t = 24)]
    horizon: usize,
    #[arg(long, default_value_t = DemandProfile::Daily)]
    profile: DemandProfile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances; with more than one, `--out` is a directory and
    /// seeds run from `--seed` upwards.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Loads an instance and optionally truncates its horizon.
pub fn load(path: &Path, horizon: Option<usize>) -> Result<UcInstance, UcError> {
    let inst = load_instance_path(path).map_err(|e| match e {
        UcError::Io(io) => UcError::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })?;
    match horizon {
        Some(0) => Err(UcError::Config("horizon must be at least 1".into())),
        Some(h) if h > inst.horizon => Err(UcError::Config(format!(
            "horizon {h} exceeds the instance's {} steps",
            inst.horizon
        ))),
        Some(h) => Ok(inst.truncated(h)),
        None => Ok(inst),
    }
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode, UcError> {
    let inst = load(&args.instance, args.horizon)?;
    let mut config = args.solver.config(args.alpha, args.seed, args.variant)?;
    config.timing = args.timing;
    let start = Instant::now();
    let result = run_increasing_rho(&inst, &config)?;
    let elapsed = start.elapsed();
    save_results(&result, &args.out, &args.trace)?;
    println!(
        "converged={} iterations={} objective={:.6} rd_l1={:.6e} time={:.3}s",
        result.converged,
        result.iterations,
        result.objective,
        result.rd_l1,
        elapsed.as_secs_f64()
    );
    Ok(if result.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_generate(args: &GenerateArgs) -> Result<ExitCode, UcError> {
    let params = SyntheticParams {
        n_gens: args.gens,
        n_nodes: args.nodes,
        n_lines: args.lines,
        n_res: args.res,
        n_storage: args.storage,
        horizon: args.horizon,
        profile: args.profile,
    };
    if args.count == 0 {
        return Err(UcError::Config("count must be at least 1".into()));
    }
    if args.count == 1 {
        save_instance(&generate_synthetic(&params, args.seed)?, &args.out)?;
        return Ok(ExitCode::SUCCESS);
    }
    std::fs::create_dir_all(&args.out)?;
    for seed in args.seed..args.seed + args.count {
        let path = args.out.join(format!("instance-{seed:04}.json"));
        save_instance(&generate_synthetic(&params, seed)?, path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), UcError> {
    let Ok(v) = std::env::var("UCADMM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        UcError::Config(format!(
            "UCADMM_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UcError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Compare(a) => compare::run_compare(a),
        Command::Generate(a) => run_generate(a),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
