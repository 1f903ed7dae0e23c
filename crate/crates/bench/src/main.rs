use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use softqn_bench::checks;
use softqn_bench::config::{ExperimentConfig, ExperimentKind};
use softqn_bench::{emit_csv, monte_carlo, BenchError};

#[derive(Parser)]
#[command(name = "softqn-bench", version, about = "Monte Carlo experiments for soft quasi-Newton methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logistic regression with minibatch gradients.
    Logreg(Common),
    /// Random quadratics with Gaussian gradient noise.
    Qp(Common),
    /// CUTEst-like problems with bounded noise and a line search.
    Cutest(Common),
    /// Two-dimensional saddle example.
    Toy(Common),
    /// Randomized invariant checks of the updates.
    Proptest {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines under `[section]` headers).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated method names to keep, in this order.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// LIBSVM data file (logreg).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Comma-separated problem names (cutest).
    #[arg(long, value_delimiter = ',')]
    problem: Vec<String>,
}

fn build_config(kind: ExperimentKind, c: Common) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_file(path, kind)?,
        None => ExperimentConfig::defaults(kind),
    };
    if cfg.kind != kind {
        return Err(BenchError::Config(format!(
            "config is for {}, not {}",
            cfg.kind.name(),
            kind.name()
        )));
    }
    if let Some(s) = c.seed {
        cfg.base_seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(o) = c.out {
        cfg.output_dir = o;
    }
    if let Some(d) = c.dataset {
        cfg.dataset = Some(d);
    }
    if !c.problem.is_empty() {
        cfg.problems = c.problem.iter().map(|p| p.trim().to_ascii_uppercase()).collect();
    }
    if !c.method.is_empty() {
        cfg.select_methods(&c.method)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_experiment(kind: ExperimentKind, c: Common) -> Result<(), BenchError> {
    let cfg = build_config(kind, c)?;
    info!("{} with {} trials, seed {}", kind.name(), cfg.trials, cfg.base_seed);
    let result = monte_carlo(&cfg)?;
    for path in emit_csv(&result, &cfg.output_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Logreg(c) => run_experiment(ExperimentKind::Logreg, c),
        Command::Qp(c) => run_experiment(ExperimentKind::Qp, c),
        Command::Cutest(c) => run_experiment(ExperimentKind::Cutest, c),
        Command::Toy(c) => run_experiment(ExperimentKind::Toy, c),
        Command::Proptest { cases, seed } => {
            let reports = checks::run_all(cases, seed);
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} ({} cases, {} failures, worst {:e})", r.name, r.cases, r.failures, r.worst);
            }
            return if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
