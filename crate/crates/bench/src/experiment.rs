//! Monte Carlo runner.
//!
//! Every trial's seed is a hash of `(base_seed, experiment tag, …, trial)`,
//! so results do not depend on execution order or thread count. QP and
//! CUTEst trials share one noise seed across methods (paired comparisons);
//! logistic-regression minibatch streams are keyed by method name as well.

use std::path::Path;
use std::sync::Arc;

use softqn::problems::{
    cutest_like, gen_random_qp, load_libsvm, logistic_problem, make_noisy, toy_2d, NoiseModel, NoisyOracle, Problem,
    CUTEST_SUBSET,
};
use softqn::rng::stream_id;
use softqn::solver::{run_with, saddle_free_inverse, Budget, RunOptions, TrialRecord};

use crate::config::{ExperimentConfig, ExperimentKind, IJCNN1_BATCH, IJCNN1_SAMPLES};
use crate::error::BenchError;

const TAG_QP_PROBLEM: u64 = 1;
const TAG_QP_NOISE: u64 = 2;
const TAG_CUTEST: u64 = 3;
const TAG_LOGREG: u64 = 4;

/// Trials of every method on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialGroup {
    pub problem: String,
    /// `(φ(x₀), φ*)` per trial.
    pub reference: Vec<(f64, Option<f64>)>,
    /// `records[method][trial]`, methods in config order.
    pub records: Vec<Vec<TrialRecord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub groups: Vec<TrialGroup>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        Execution::Serial
    }
}

fn name_key(name: &str) -> u64 {
    stream_id(&name.bytes().map(u64::from).collect::<Vec<_>>())
}

/// A problem instance shared by all trials of a group, or generated per
/// trial for QPs.
enum Setup {
    Qp { n: usize },
    Fixed { problem: Problem, subset_index: u64 },
    Logreg { problem: Problem, batch: usize },
    Toy { problem: Problem },
}

struct Prepared {
    name: String,
    setup: Setup,
}

fn load_dataset(cfg: &ExperimentConfig) -> Result<(Problem, usize), BenchError> {
    let path = cfg.dataset.as_deref().ok_or_else(|| BenchError::Config("logreg needs a dataset".into()))?;
    let data = load_libsvm(path).map_err(|e| dataset_error(path, e))?;
    if data.n_samples() == 0 {
        return Err(BenchError::Dataset(format!("{} contains no samples", path.display())));
    }
    let samples = data.n_samples();
    Ok((logistic_problem(Arc::new(data), cfg.rho)?, samples))
}

fn dataset_error(path: &Path, e: softqn::ProblemError) -> BenchError {
    BenchError::Dataset(format!(
        "{e}\ncannot load {}: pass a LIBSVM file with --dataset <path> or set \
         `dataset` under [problem]. The ijcnn1 set is available from the LIBSVM \
         data collection; a synthetic fixture ships in crates/bench/fixtures.",
        path.display()
    ))
}

fn prepare(cfg: &ExperimentConfig) -> Result<Vec<Prepared>, BenchError> {
    Ok(match cfg.kind {
        ExperimentKind::Qp => vec![Prepared {
            name: format!("QP{}", cfg.n),
            setup: Setup::Qp { n: cfg.n },
        }],
        ExperimentKind::Cutest => cfg
            .problems
            .iter()
            .map(|name| {
                let (idx, (canon, dim)) = CUTEST_SUBSET
                    .iter()
                    .enumerate()
                    .find(|(_, (n, _))| n.eq_ignore_ascii_case(name))
                    .ok_or_else(|| BenchError::Config(format!("unknown cutest problem {name:?}")))?;
                Ok(Prepared {
                    name: canon.to_string(),
                    setup: Setup::Fixed {
                        problem: cutest_like(canon, *dim)?,
                        subset_index: idx as u64,
                    },
                })
            })
            .collect::<Result<_, BenchError>>()?,
        ExperimentKind::Logreg => {
            let (problem, samples) = load_dataset(cfg)?;
            let batch = cfg
                .batch
                .unwrap_or_else(|| ((samples * IJCNN1_BATCH) as f64 / IJCNN1_SAMPLES as f64).round() as usize)
                .clamp(1, samples);
            vec![Prepared {
                name: "LOGREG".into(),
                setup: Setup::Logreg { problem, batch },
            }]
        }
        ExperimentKind::Toy => vec![Prepared {
            name: "TOY2D".into(),
            setup: Setup::Toy { problem: toy_2d() },
        }],
    })
}

fn run_job(cfg: &ExperimentConfig, prep: &Prepared, method: usize, trial: usize) -> Result<(TrialRecord, (f64, Option<f64>)), BenchError> {
    let spec = &cfg.methods[method];
    let t = trial as u64;
    let base = cfg.base_seed;
    let mut opts = RunOptions::default();
    let (mut oracle, e_f, e_g): (NoisyOracle, f64, f64) = match &prep.setup {
        Setup::Qp { n } => {
            let p = gen_random_qp(*n, stream_id(&[base, TAG_QP_PROBLEM, t]))?;
            let noise = NoiseModel::GaussianGrad(cfg.grad_noise);
            let o = make_noisy(p, NoiseModel::None, noise, stream_id(&[base, TAG_QP_NOISE, t]))?;
            (o, 0.0, cfg.grad_noise.sqrt())
        }
        Setup::Fixed { problem, subset_index } => {
            let x0 = problem.x0();
            let e_f = cfg.noise_rel * problem.phi(x0).abs();
            let e_g = cfg.noise_rel * problem.grad(x0).norm();
            let seed = stream_id(&[base, TAG_CUTEST, *subset_index, t]);
            let o = make_noisy(problem.clone(), NoiseModel::UniformFun(e_f), NoiseModel::SphereGrad(e_g), seed)?;
            (o, e_f, e_g)
        }
        Setup::Logreg { problem, batch } => {
            let seed = stream_id(&[base, TAG_LOGREG, name_key(&spec.name), t]);
            let o = make_noisy(problem.clone(), NoiseModel::None, NoiseModel::Minibatch(*batch), seed)?;
            (o, 0.0, 1.0)
        }
        Setup::Toy { problem } => {
            let hess = problem.hess(problem.x0()).expect("toy problem has a Hessian");
            opts.h0 = Some(saddle_free_inverse(&hess)?);
            opts.record_iterates = true;
            (make_noisy(problem.clone(), NoiseModel::None, NoiseModel::None, base)?, 0.0, 1.0)
        }
    };
    let p = oracle.problem();
    let reference = (p.phi(p.x0()), p.phi_star());
    let method_impl = spec.setting.resolve(e_g);
    let step = cfg.step.resolve(e_f);
    let record = run_with(&mut oracle, &method_impl, &step, cfg.budget, &opts)?;
    Ok((record, reference))
}

/// Runs every (problem, method, trial) combination with the default
/// execution mode.
pub fn monte_carlo(cfg: &ExperimentConfig) -> Result<ExperimentResult, BenchError> {
    monte_carlo_with(cfg, Execution::default())
}

pub fn monte_carlo_with(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult, BenchError> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let jobs: Vec<(usize, usize, usize)> = (0..prepared.len())
        .flat_map(|g| (0..cfg.methods.len()).flat_map(move |m| (0..cfg.trials).map(move |t| (g, m, t))))
        .collect();
    let work = |&(g, m, t): &(usize, usize, usize)| run_job(cfg, &prepared[g], m, t);
    let outputs: Vec<_> = match exec {
        Execution::Serial => jobs.iter().map(work).collect::<Result<_, _>>()?,
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(work).collect::<Result<_, _>>()?
        }
    };

    let mut outputs = outputs.into_iter();
    let mut groups = Vec::with_capacity(prepared.len());
    for prep in &prepared {
        let mut records = Vec::with_capacity(cfg.methods.len());
        let mut reference = Vec::new();
        for m in 0..cfg.methods.len() {
            let mut per_method = Vec::with_capacity(cfg.trials);
            for _ in 0..cfg.trials {
                let (rec, r) = outputs.next().expect("one output per job");
                if m == 0 {
                    reference.push(r);
                }
                per_method.push(rec);
            }
            records.push(per_method);
        }
        groups.push(TrialGroup {
            problem: prep.name.clone(),
            reference,
            records,
        });
    }
    Ok(ExperimentResult {
        config: cfg.clone(),
        groups,
    })
}

/// Length of the evaluation grid used for aligned traces.
pub fn eval_grid(cfg: &ExperimentConfig) -> Option<usize> {
    match cfg.budget {
        Budget::FunEvals(n) => Some(n),
        Budget::Iterations(_) => None,
    }
}
