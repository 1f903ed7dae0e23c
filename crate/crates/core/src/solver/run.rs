use super::line_search::backtrack;
use super::{compute_direction, Budget, DirectionMethod, SolverState, StepPolicy};
use crate::error::{QnError, SolverError};
use crate::linalg::{CurvaturePair, InverseHessianApprox, Vector};
use crate::problems::NoisyOracle;
use crate::update::{bfgs_update, soft_qn_update, sp_bfgs_update};

/// Iterates whose norm exceeds this are treated as divergence.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Starting inverse Hessian for quasi-Newton methods; identity if unset.
    pub h0: Option<InverseHessianApprox>,
    /// Keep every iterate in [`TrialRecord::iterates`].
    pub record_iterates: bool,
    pub divergence_norm: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            h0: None,
            record_iterates: false,
            divergence_norm: DIVERGENCE_NORM,
        }
    }
}

/// Metric traces of one run, measured on the true objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: &'static str,
    /// `‖∇φ(x_k)‖` for `k = 0, 1, …`.
    pub true_grad_norm: Vec<f64>,
    /// `φ(x_k) − φ*`, or `φ(x_k)` when `φ*` is unknown.
    pub true_suboptimality: Vec<f64>,
    /// `(j, φ(x) − φ*)` where `x` is the iterate after `j` function
    /// evaluations; one entry per completed line search, starting at `j = 0`.
    pub eval_trace: Vec<(usize, f64)>,
    pub iterates: Vec<Vector>,
    pub final_x: Vector,
    pub iterations: usize,
    pub fun_evals: usize,
    pub grad_evals: usize,
    /// Line searches that returned a zero step.
    pub step_rejections: usize,
    /// Quasi-Newton updates skipped by a curvature or threshold guard.
    pub update_skips: usize,
    /// Updates dropped because rounding destroyed positive definiteness.
    pub pd_failures: usize,
    pub diverged: bool,
    /// The evaluation budget cut a line search short.
    pub interrupted: bool,
}

impl TrialRecord {
    pub fn final_grad_norm(&self) -> f64 {
        *self.true_grad_norm.last().expect("non-empty trace")
    }

    pub fn final_suboptimality(&self) -> f64 {
        *self.true_suboptimality.last().expect("non-empty trace")
    }
}

/// Runs `method` with default options.
pub fn run(
    oracle: &mut NoisyOracle,
    method: &DirectionMethod,
    step: &StepPolicy,
    budget: Budget,
) -> Result<TrialRecord, SolverError> {
    run_with(oracle, method, step, budget, &RunOptions::default())
}

pub fn run_with(
    oracle: &mut NoisyOracle,
    method: &DirectionMethod,
    step: &StepPolicy,
    budget: Budget,
    opts: &RunOptions,
) -> Result<TrialRecord, SolverError> {
    method.validate()?;
    step.validate()?;
    let armijo = match (step, budget) {
        (StepPolicy::ArmijoNoisy(a), _) => Some(*a),
        (_, Budget::FunEvals(_)) => {
            return Err(SolverError::Config(
                "an evaluation budget needs the noisy line search".into(),
            ))
        }
        _ => None,
    };
    let n = oracle.problem().dim();
    if method.needs_hessian() && !oracle.problem().has_hessian() {
        return Err(SolverError::MissingHessian(method.label()));
    }
    let h0 = match (&opts.h0, method.is_quasi_newton()) {
        (Some(h), true) if h.dim() != n => {
            return Err(SolverError::Config(format!("H0 has dimension {}, problem {n}", h.dim())))
        }
        (Some(h), true) => Some(h.clone()),
        (None, true) => Some(InverseHessianApprox::identity(n)),
        _ => None,
    };
    let phi_star = oracle.problem().phi_star().unwrap_or(0.0);
    let x0 = oracle.problem().x0().clone();

    let mut rec = TrialRecord {
        method: method.label(),
        true_grad_norm: Vec::new(),
        true_suboptimality: Vec::new(),
        eval_trace: Vec::new(),
        iterates: Vec::new(),
        final_x: x0.clone(),
        iterations: 0,
        fun_evals: 0,
        grad_evals: 0,
        step_rejections: 0,
        update_skips: 0,
        pd_failures: 0,
        diverged: false,
        interrupted: false,
    };
    let observe = |rec: &mut TrialRecord, oracle: &NoisyOracle, x: &Vector| {
        rec.true_grad_norm.push(oracle.true_grad(x).norm());
        rec.true_suboptimality.push(oracle.true_phi(x) - phi_star);
        if opts.record_iterates {
            rec.iterates.push(x.clone());
        }
    };

    let g0 = oracle.g(&x0);
    let mut f_x = armijo.map(|_| oracle.f(&x0));
    let mut state = SolverState::new(x0, g0, h0);
    observe(&mut rec, oracle, &state.x);
    rec.eval_trace.push((0, oracle.true_phi(&state.x) - phi_star));

    loop {
        match budget {
            Budget::Iterations(k) if state.k >= k => break,
            Budget::FunEvals(b) if oracle.fun_evals() >= b => break,
            _ => {}
        }
        let hess = if method.needs_hessian() {
            oracle.true_hess(&state.x)
        } else {
            None
        };
        let p = compute_direction(method, &state, &state.g, hess.as_ref())?;
        if !p.iter().all(|v| v.is_finite()) {
            rec.diverged = true;
            break;
        }
        let k = state.k + 1;
        let mut stop_after_move = false;
        let eta = match step {
            StepPolicy::Fixed(e) => *e,
            StepPolicy::Diminishing(scale) => scale / k as f64,
            StepPolicy::ArmijoNoisy(params) => {
                let cap = match budget {
                    Budget::FunEvals(b) => Some(b - oracle.fun_evals()),
                    Budget::Iterations(_) => None,
                };
                let fx = f_x.expect("evaluated with the line search");
                let out = backtrack(oracle, &state.x, fx, &p, &state.g, params, cap);
                if out.eta == 0.0 {
                    rec.step_rejections += 1;
                } else {
                    f_x = out.f_new;
                }
                rec.interrupted = out.interrupted;
                // No gradient is drawn once the evaluation budget is spent.
                stop_after_move = matches!(budget, Budget::FunEvals(b) if oracle.fun_evals() >= b);
                out.eta
            }
        };

        let x_new = if eta == 0.0 { state.x.clone() } else { &state.x + &p * eta };
        if !x_new.iter().all(|v| v.is_finite()) || x_new.norm() > opts.divergence_norm {
            rec.diverged = true;
            break;
        }
        if armijo.is_some() {
            rec.eval_trace
                .push((oracle.fun_evals(), oracle.true_phi(&x_new) - phi_star));
        }
        if stop_after_move {
            state.x = x_new;
            break;
        }

        let g_new = oracle.g(&x_new);
        if !g_new.iter().all(|v| v.is_finite()) {
            rec.diverged = true;
            break;
        }
        if let Some(h) = state.h.take() {
            let s = &x_new - &state.x;
            let y = &g_new - &state.g;
            let pair = CurvaturePair::new(s, y)?;
            state.h = Some(update_h(method, h, &pair, &mut rec)?);
        }
        state.x = x_new;
        state.g = g_new;
        state.k = k;
        observe(&mut rec, oracle, &state.x);
    }

    if rec.diverged {
        if let Budget::Iterations(k) = budget {
            let (gn, so) = (rec.final_grad_norm(), rec.final_suboptimality());
            rec.true_grad_norm.resize(k + 1, gn);
            rec.true_suboptimality.resize(k + 1, so);
        }
    }
    rec.iterations = state.k;
    rec.final_x = state.x;
    rec.fun_evals = oracle.fun_evals();
    rec.grad_evals = oracle.grad_evals();
    Ok(rec)
}

fn update_h(
    method: &DirectionMethod,
    h: InverseHessianApprox,
    pair: &CurvaturePair,
    rec: &mut TrialRecord,
) -> Result<InverseHessianApprox, SolverError> {
    let result = match method {
        DirectionMethod::SoftQN(policy) => {
            let alpha = policy.alpha(&h, pair);
            soft_qn_update(&h, pair, alpha).map(|(next, _)| next)
        }
        DirectionMethod::SPBFGS(_) | DirectionMethod::StochasticBFGS if pair.is_zero_step() => {
            rec.update_skips += 1;
            return Ok(h);
        }
        DirectionMethod::SPBFGS(policy) => sp_bfgs_update(&h, pair, policy.beta(pair)),
        DirectionMethod::StochasticBFGS => bfgs_update(&h, pair),
        _ => return Ok(h),
    };
    match result {
        Ok(next) => Ok(next),
        Err(QnError::Curvature { .. } | QnError::PdThreshold { .. } | QnError::Singular(_)) => {
            rec.update_skips += 1;
            Ok(h)
        }
        Err(QnError::NotPositiveDefinite | QnError::Internal(_) | QnError::NonFinite(_)) => {
            log::warn!("{}: update dropped after losing positive definiteness", method.label());
            rec.pd_failures += 1;
            Ok(h)
        }
        Err(e) => Err(e.into()),
    }
}
