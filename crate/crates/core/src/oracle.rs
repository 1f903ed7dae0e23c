//! Brute-force reference for the soft QN update.
//!
//! Minimizes the penalized log-det objective
//!
//! `Υ(B) = tr(BH) − log det(BH) + α(sᵀBs − 2sᵀy + yᵀB⁻¹y)`
//!
//! directly over the positive definite cone, without using the closed form.
//! `B` is parameterized as `LLᵀ` with `L` lower triangular and
//! `L_ii = exp(θ_ii)`, so every parameter vector is feasible. The search is
//! a Levenberg–Marquardt damped Newton iteration on `θ` with a
//! finite-difference Hessian of the analytic gradient.

use nalgebra::{DMatrix, DVector};

use crate::error::{OracleError, QnError};
use crate::linalg::{CurvaturePair, SymMat};

/// Largest dimension the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 6;

/// Default residual tolerance for [`minimize_penalty_objective`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default iteration cap for [`minimize_penalty_objective`].
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Data of the penalized matrix problem: previous approximation `H`, pair
/// `(s, y)` and penalty `α`.
#[derive(Debug, Clone)]
pub struct PenaltyObjectiveSpec {
    h_prev: SymMat,
    pair: CurvaturePair,
    alpha: f64,
    log_det_h: f64,
}

impl PenaltyObjectiveSpec {
    pub fn new(h_prev: SymMat, pair: CurvaturePair, alpha: f64) -> Result<Self, QnError> {
        if h_prev.dim() != pair.dim() {
            return Err(QnError::Dimension {
                expected: h_prev.dim(),
                got: pair.dim(),
            });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QnError::InvalidArgument(format!(
                "penalty must be positive, got {alpha}"
            )));
        }
        let chol = h_prev.cholesky().ok_or(QnError::NotPositiveDefinite)?;
        let log_det_h = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            h_prev,
            pair,
            alpha,
            log_det_h,
        })
    }

    pub fn h_prev(&self) -> &SymMat {
        &self.h_prev
    }

    pub fn pair(&self) -> &CurvaturePair {
        &self.pair
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.h_prev.dim()
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub b_star: SymMat,
    pub h_star: SymMat,
    pub objective_value: f64,
    pub stationarity_residual: f64,
    pub iterations: usize,
}

/// Value of `Υ(B)`. Fails if `B` is not positive definite.
pub fn penalty_objective(spec: &PenaltyObjectiveSpec, b: &SymMat) -> Result<f64, QnError> {
    let chol = b.cholesky().ok_or(QnError::NotPositiveDefinite)?;
    let l = chol.l();
    Ok(objective_from_factor(spec, b.matrix(), &l, &chol))
}

/// Frobenius norm of the first-order condition
/// `H − B⁻¹ + α(ssᵀ − B⁻¹yyᵀB⁻¹)`.
pub fn stationarity_residual(spec: &PenaltyObjectiveSpec, b: &SymMat) -> Result<f64, QnError> {
    Ok(penalty_gradient(spec, b)?.norm())
}

/// Gradient of `Υ` with respect to symmetric `B`:
/// `H − B⁻¹ + α(ssᵀ − B⁻¹yyᵀB⁻¹)`.
pub fn penalty_gradient(
    spec: &PenaltyObjectiveSpec,
    b: &SymMat,
) -> Result<DMatrix<f64>, QnError> {
    let chol = b.cholesky().ok_or(QnError::NotPositiveDefinite)?;
    Ok(gradient_from_inverse(spec, &chol.inverse()))
}

/// Minimizes `Υ` until the stationarity residual drops to `tol`.
pub fn minimize_penalty_objective(
    spec: &PenaltyObjectiveSpec,
    tol: f64,
) -> Result<OracleResult, OracleError> {
    minimize_with_cap(spec, tol, DEFAULT_MAX_ITER)
}

pub fn minimize_with_cap(
    spec: &PenaltyObjectiveSpec,
    tol: f64,
    max_iter: usize,
) -> Result<OracleResult, OracleError> {
    let n = spec.dim();
    if n > MAX_ORACLE_DIM {
        return Err(OracleError::TooLarge {
            n,
            max: MAX_ORACLE_DIM,
        });
    }
    let tri = TriangularParams::new(n);

    // Start from the unpenalized minimizer B = H⁻¹.
    let b0 = crate::linalg::spd_inverse(spec.h_prev())?;
    let l0 = b0.cholesky().ok_or(QnError::NotPositiveDefinite)?.l();
    let mut theta = tri.params_of(&l0);
    let mut state = tri.evaluate(spec, &theta);
    let mut damping = 1e-3;

    for iter in 0..max_iter {
        if state.residual <= tol {
            return Ok(tri.result(&theta, state, iter));
        }
        let hess = tri.fd_hessian(spec, &theta);
        let mut accepted = false;
        for _ in 0..60 {
            let Some(step) = damped_step(&hess, &state.grad, damping) else {
                damping *= 10.0;
                continue;
            };
            let trial = &theta + &step;
            let next = tri.evaluate(spec, &trial);
            // Near the minimizer changes in Υ fall below the rounding error of
            // the log-det evaluation; the residual decides there.
            let rounding = 1e-10 * state.value.abs().max(1.0);
            let better = next.value.is_finite()
                && (next.value < state.value
                    || (next.value <= state.value + rounding && next.residual < state.residual));
            if better {
                theta = trial;
                state = next;
                damping = (damping / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            damping *= 4.0;
        }
        if !accepted {
            return Err(OracleError::NoConvergence {
                iterations: iter,
                residual: state.residual,
            });
        }
    }
    if state.residual <= tol {
        return Ok(tri.result(&theta, state, max_iter));
    }
    Err(OracleError::NoConvergence {
        iterations: max_iter,
        residual: state.residual,
    })
}

fn damped_step(hess: &DMatrix<f64>, grad: &DVector<f64>, damping: f64) -> Option<DVector<f64>> {
    let scale = hess.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut a = hess.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += damping * scale;
    }
    let chol = a.cholesky()?;
    Some(-chol.solve(grad))
}

fn objective_from_factor(
    spec: &PenaltyObjectiveSpec,
    b: &DMatrix<f64>,
    l: &DMatrix<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
) -> f64 {
    let h = spec.h_prev.matrix();
    let s = spec.pair.s();
    let y = spec.pair.y();
    let tr_bh = b.component_mul(h).sum();
    let log_det_b = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let s_b_s = s.dot(&(b * s));
    let y_binv_y = y.dot(&chol.solve(y));
    tr_bh - (log_det_b + spec.log_det_h) + spec.alpha * (s_b_s - 2.0 * s.dot(y) + y_binv_y)
}

fn gradient_from_inverse(spec: &PenaltyObjectiveSpec, b_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let s = spec.pair.s();
    let y = spec.pair.y();
    let w = b_inv * y;
    let g = spec.h_prev.matrix() - b_inv + (s * s.transpose() - &w * w.transpose()) * spec.alpha;
    let gt = g.transpose();
    (g + gt) * 0.5
}

struct EvalState {
    value: f64,
    grad: DVector<f64>,
    residual: f64,
}

/// Maps between `θ` and the lower-triangular factor `L` (column-major
/// lower triangle, diagonal stored as logs).
struct TriangularParams {
    n: usize,
    index: Vec<(usize, usize)>,
}

impl TriangularParams {
    fn new(n: usize) -> Self {
        let index = (0..n)
            .flat_map(|j| (j..n).map(move |i| (i, j)))
            .collect();
        Self { n, index }
    }

    fn params_of(&self, l: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.index.len(),
            self.index.iter().map(|&(i, j)| {
                if i == j {
                    l[(i, j)].ln()
                } else {
                    l[(i, j)]
                }
            }),
        )
    }

    fn factor(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for (k, &(i, j)) in self.index.iter().enumerate() {
            l[(i, j)] = if i == j { theta[k].exp() } else { theta[k] };
        }
        l
    }

    fn evaluate(&self, spec: &PenaltyObjectiveSpec, theta: &DVector<f64>) -> EvalState {
        let l = self.factor(theta);
        let b = &l * l.transpose();
        let Some(chol) = b.clone().cholesky() else {
            return EvalState {
                value: f64::INFINITY,
                grad: DVector::zeros(theta.len()),
                residual: f64::INFINITY,
            };
        };
        let value = objective_from_factor(spec, &b, &chol.l(), &chol);
        let g = gradient_from_inverse(spec, &chol.inverse());
        let gl = &g * &l * 2.0;
        let grad = DVector::from_iterator(
            theta.len(),
            self.index.iter().map(|&(i, j)| {
                if i == j {
                    gl[(i, j)] * l[(i, j)]
                } else {
                    gl[(i, j)]
                }
            }),
        );
        EvalState {
            value,
            grad,
            residual: g.norm(),
        }
    }

    fn fd_hessian(&self, spec: &PenaltyObjectiveSpec, theta: &DVector<f64>) -> DMatrix<f64> {
        let p = theta.len();
        let mut hess = DMatrix::zeros(p, p);
        for k in 0..p {
            let h = 1e-6 * theta[k].abs().max(1.0);
            let mut plus = theta.clone();
            plus[k] += h;
            let mut minus = theta.clone();
            minus[k] -= h;
            let col = (self.evaluate(spec, &plus).grad - self.evaluate(spec, &minus).grad)
                / (2.0 * h);
            hess.set_column(k, &col);
        }
        let t = hess.transpose();
        (hess + t) * 0.5
    }

    fn result(
        &self,
        theta: &DVector<f64>,
        state: EvalState,
        iterations: usize,
    ) -> OracleResult {
        let l = self.factor(theta);
        let b_star = SymMat::symmetrized(&l * l.transpose());
        let h_star = crate::linalg::spd_inverse(&b_star).expect("factor has positive diagonal");
        OracleResult {
            b_star,
            h_star,
            objective_value: state.value,
            stationarity_residual: state.residual,
            iterations,
        }
    }
}
