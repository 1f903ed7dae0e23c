use nalgebra::SymmetricEigen;

use super::{DirectionMethod, SolverState};
use crate::error::SolverError;
use crate::linalg::{InverseHessianApprox, SymMat, Vector};
use crate::update::biased_direction;

/// Eigenvalues below this fraction of the largest magnitude are treated as
/// zero when inverting an exact Hessian.
const PINV_RTOL: f64 = 1e-12;

fn eigen(hess: &SymMat) -> Result<SymmetricEigen<f64, nalgebra::Dyn>, SolverError> {
    if !hess.is_finite() {
        return Err(SolverError::Numerical("non-finite Hessian".into()));
    }
    SymmetricEigen::try_new(hess.matrix().clone(), f64::EPSILON, 0)
        .ok_or_else(|| SolverError::Numerical("symmetric eigendecomposition did not converge".into()))
}

/// `|A| = V|Λ|Vᵀ`: same eigenvectors, absolute eigenvalues.
pub fn saddle_free_abs(hess: &SymMat) -> Result<SymMat, SolverError> {
    let eig = eigen(hess)?;
    let abs = eig.eigenvalues.map(f64::abs);
    let m = &eig.eigenvectors * nalgebra::DMatrix::from_diagonal(&abs) * eig.eigenvectors.transpose();
    Ok(SymMat::symmetrized(m))
}

/// `|A|⁻¹` as an inverse-Hessian approximation, for seeding quasi-Newton
/// methods from the local curvature.
pub fn saddle_free_inverse(hess: &SymMat) -> Result<InverseHessianApprox, SolverError> {
    let eig = eigen(hess)?;
    if eig.eigenvalues.iter().any(|&l| l == 0.0) {
        return Err(SolverError::Numerical("singular Hessian has no |H|^-1".into()));
    }
    let inv = eig.eigenvalues.map(|l| 1.0 / l.abs());
    let m = &eig.eigenvectors * nalgebra::DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose();
    Ok(InverseHessianApprox::new(SymMat::symmetrized(m))?)
}

/// `−f(A)⁺g` where `f` acts on the eigenvalues and tiny ones are dropped.
fn spectral_solve(hess: &SymMat, g: &Vector, abs: bool) -> Result<Vector, SolverError> {
    let eig = eigen(hess)?;
    let scale = eig.eigenvalues.amax();
    let cut = PINV_RTOL * scale;
    let mut dropped = 0;
    let coeffs = eig.eigenvectors.transpose() * g;
    let scaled = Vector::from_fn(coeffs.len(), |i, _| {
        let l = if abs { eig.eigenvalues[i].abs() } else { eig.eigenvalues[i] };
        if l.abs() <= cut {
            dropped += 1;
            0.0
        } else {
            coeffs[i] / l
        }
    });
    if dropped > 0 {
        log::warn!("singular Hessian: pseudo-inverse drops {dropped} eigenvalue(s)");
    }
    Ok(-(&eig.eigenvectors * scaled))
}

/// Search direction for `method` from gradient `g`. Quasi-Newton methods
/// read `state.h`; Newton variants need `hess`.
pub fn compute_direction(
    method: &DirectionMethod,
    state: &SolverState,
    g: &Vector,
    hess: Option<&SymMat>,
) -> Result<Vector, SolverError> {
    let qn = |lambda: f64| -> Result<Vector, SolverError> {
        let h = state
            .h
            .as_ref()
            .ok_or_else(|| SolverError::Config("quasi-Newton method without H".into()))?;
        Ok(biased_direction(h, g, lambda)?)
    };
    match method {
        DirectionMethod::SoftQN(policy) => qn(policy.bias_lambda),
        DirectionMethod::SPBFGS(_) | DirectionMethod::StochasticBFGS => qn(0.0),
        DirectionMethod::SGD => Ok(-g),
        DirectionMethod::NewtonExact => {
            spectral_solve(hess.ok_or(SolverError::MissingHessian("Newton"))?, g, false)
        }
        DirectionMethod::SaddleFreeNewton => spectral_solve(
            hess.ok_or(SolverError::MissingHessian("saddle-free Newton"))?,
            g,
            true,
        ),
    }
}
