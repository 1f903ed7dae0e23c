use super::ArmijoParams;
use crate::linalg::Vector;
use crate::problems::NoisyOracle;

/// Result of one backtracking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    /// Accepted step, or 0 when the trial point was rejected.
    pub eta: f64,
    /// Noisy value at the accepted point.
    pub f_new: Option<f64>,
    /// Number of function evaluations spent.
    pub evals: usize,
    /// The evaluation cap stopped the search early.
    pub interrupted: bool,
}

/// Backtracking under noise: try `η₀, τη₀, …, τᵀη₀` until
/// `f(x + ηp) ≤ f(x) + ηc·pᵀg + 2ε`. If none passes, the last trial is
/// still accepted when `f(x + ηp) < f(x) + 2ε`; otherwise the step is 0.
///
/// Evaluates `f(x)` once (counted). Use [`backtrack`] to supply a known
/// `f(x)`.
pub fn line_search_noisy(
    oracle: &mut NoisyOracle,
    x: &Vector,
    p: &Vector,
    g_x: &Vector,
    policy: &ArmijoParams,
) -> f64 {
    let f_x = oracle.f(x);
    backtrack(oracle, x, f_x, p, g_x, policy, None).eta
}

/// [`line_search_noisy`] with a known `f(x)` and an optional cap on the
/// number of evaluations. When the cap is hit, the final acceptance check
/// is applied to the last evaluated trial point.
pub fn backtrack(
    oracle: &mut NoisyOracle,
    x: &Vector,
    f_x: f64,
    p: &Vector,
    g_x: &Vector,
    policy: &ArmijoParams,
    max_evals: Option<usize>,
) -> SearchOutcome {
    let slope = policy.c * p.dot(g_x);
    let allowance = 2.0 * policy.eps_tol;
    let mut eta = policy.eta0;
    let mut evals = 0;
    let mut last: Option<(f64, f64)> = None;
    for _ in 0..=policy.max_backtracks {
        if max_evals.is_some_and(|cap| evals >= cap) {
            return final_check(last, f_x + allowance, evals, true);
        }
        let f_trial = oracle.f(&(x + p * eta));
        evals += 1;
        if f_trial <= f_x + eta * slope + allowance {
            return SearchOutcome {
                eta,
                f_new: Some(f_trial),
                evals,
                interrupted: false,
            };
        }
        last = Some((eta, f_trial));
        eta *= policy.tau;
    }
    final_check(last, f_x + allowance, evals, false)
}

fn final_check(last: Option<(f64, f64)>, bound: f64, evals: usize, interrupted: bool) -> SearchOutcome {
    match last {
        Some((eta, f_trial)) if f_trial < bound => SearchOutcome {
            eta,
            f_new: Some(f_trial),
            evals,
            interrupted,
        },
        _ => SearchOutcome {
            eta: 0.0,
            f_new: None,
            evals,
            interrupted,
        },
    }
}
