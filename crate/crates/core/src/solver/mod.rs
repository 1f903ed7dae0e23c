//! The optimization loop `x⁺ = x + ηp`, with pluggable search directions
//! and step-size rules.

use crate::error::SolverError;
use crate::linalg::{InverseHessianApprox, Vector};
use crate::penalty::{SoftQnPenaltyPolicy, SpBfgsPenaltyPolicy};

mod direction;
mod line_search;
mod run;

pub use direction::{compute_direction, saddle_free_abs, saddle_free_inverse};
pub use line_search::{backtrack, line_search_noisy, SearchOutcome};
pub use run::{run, run_with, RunOptions, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionMethod {
    SoftQN(SoftQnPenaltyPolicy),
    SPBFGS(SpBfgsPenaltyPolicy),
    /// BFGS that skips pairs failing the curvature condition.
    StochasticBFGS,
    SGD,
    NewtonExact,
    /// Newton on `|∇²φ|`, which turns saddles into minima.
    SaddleFreeNewton,
}

impl DirectionMethod {
    pub fn label(&self) -> &'static str {
        match self {
            DirectionMethod::SoftQN(_) => "softqn",
            DirectionMethod::SPBFGS(_) => "spbfgs",
            DirectionMethod::StochasticBFGS => "bfgs",
            DirectionMethod::SGD => "sgd",
            DirectionMethod::NewtonExact => "newton",
            DirectionMethod::SaddleFreeNewton => "saddlefree",
        }
    }

    pub fn is_quasi_newton(&self) -> bool {
        matches!(
            self,
            DirectionMethod::SoftQN(_) | DirectionMethod::SPBFGS(_) | DirectionMethod::StochasticBFGS
        )
    }

    pub fn needs_hessian(&self) -> bool {
        matches!(self, DirectionMethod::NewtonExact | DirectionMethod::SaddleFreeNewton)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        match self {
            DirectionMethod::SoftQN(p) => p.validate()?,
            DirectionMethod::SPBFGS(p) => p.validate()?,
            _ => {}
        }
        Ok(())
    }
}

/// Constants of the noisy backtracking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoParams {
    pub eta0: f64,
    pub c: f64,
    pub tau: f64,
    /// Maximum number of step reductions `T`.
    pub max_backtracks: usize,
    /// Noise allowance `ε_tol`.
    pub eps_tol: f64,
}

impl ArmijoParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.eta0 > 0.0
            && self.c > 0.0
            && self.tau > 0.0
            && self.tau < 1.0
            && self.eps_tol >= 0.0
            && [self.eta0, self.c, self.eps_tol].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(SolverError::Config(format!("invalid line-search constants {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    Fixed(f64),
    /// `η_k = scale/k` for `k = 1, 2, …`.
    Diminishing(f64),
    ArmijoNoisy(ArmijoParams),
}

impl StepPolicy {
    pub fn validate(&self) -> Result<(), SolverError> {
        match self {
            StepPolicy::Fixed(e) | StepPolicy::Diminishing(e) if !(*e > 0.0 && e.is_finite()) => {
                Err(SolverError::Config(format!("step size must be positive, got {e}")))
            }
            StepPolicy::ArmijoNoisy(a) => a.validate(),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Iterations(usize),
    /// Counts noisy function evaluations only; needs a line search.
    FunEvals(usize),
}

/// Mutable iterate state of one run.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x: Vector,
    /// Last noisy gradient.
    pub g: Vector,
    pub h: Option<InverseHessianApprox>,
    pub k: usize,
    pub fun_evals: usize,
    pub grad_evals: usize,
}

impl SolverState {
    pub fn new(x: Vector, g: Vector, h: Option<InverseHessianApprox>) -> Self {
        Self {
            x,
            g,
            h,
            k: 0,
            fun_evals: 0,
            grad_evals: 0,
        }
    }
}
