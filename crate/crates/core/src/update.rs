//! Closed-form inverse-Hessian updates: soft QN, BFGS and SP-BFGS.
//!
//! All three updates take the current approximation `H` and a curvature pair
//! `(s, y)` and return a new symmetric positive definite approximation. Soft
//! QN is defined for every pair and every penalty `α > 0`; BFGS needs
//! `sᵀy > 0` and SP-BFGS needs `sᵀy > −1/β`.

use nalgebra::DMatrix;

use crate::error::QnError;
use crate::linalg::{CurvaturePair, InverseHessianApprox, SymMat, Vector};

/// `yᵀHy` may come out slightly negative through rounding; anything below
/// this means `H` was not positive definite.
const NEGATIVE_QUAD_TOL: f64 = -1e-12;

/// Relative curvature threshold used by [`bfgs_update`].
pub const BFGS_CURVATURE_RTOL: f64 = 1e-12;

/// Smallest admissible magnitude of an SP-BFGS coefficient denominator.
pub const SP_BFGS_SINGULAR_TOL: f64 = 1e-14;

/// Intermediate quantities of a soft QN update.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftQnScratch {
    /// Normalizer `γ = ½ + √(¼ + α yᵀHy + α²(sᵀy)²)`.
    pub gamma: f64,
    /// Rank-one correction direction `u = (Hy + α(sᵀy)s)/γ`.
    pub u: Vector,
}

/// Normalizer of the soft QN rank-one correction.
///
/// Returns `½ + √(¼ + α·yHy + α²·sTy²)`, which is at least one whenever
/// `yHy ≥ 0`.
pub fn soft_qn_gamma(alpha: f64, yhy: f64, sty: f64) -> Result<f64, QnError> {
    if !(alpha.is_finite() && yhy.is_finite() && sty.is_finite()) {
        return Err(QnError::NonFinite("soft QN gamma arguments"));
    }
    if alpha < 0.0 {
        return Err(QnError::InvalidArgument(format!(
            "penalty must be positive, got {alpha}"
        )));
    }
    if yhy < NEGATIVE_QUAD_TOL {
        return Err(QnError::Domain(format!(
            "y'Hy = {yhy:e} < 0; H is not positive definite"
        )));
    }
    let yhy = yhy.max(0.0);
    let a_sty = alpha * sty;
    Ok(0.5 + (0.25 + alpha * yhy + a_sty * a_sty).sqrt())
}

/// Soft QN update
/// `H⁺ = H + α ssᵀ − (α/γ²)(Hy + α(sᵀy)s)(Hy + α(sᵀy)s)ᵀ`.
///
/// The result is the inverse of the unique minimizer of the penalized
/// log-det problem and is positive definite for every `α > 0` and every
/// finite pair, including `sᵀy ≤ 0` and `s = 0`.
pub fn soft_qn_update(
    h: &InverseHessianApprox,
    pair: &CurvaturePair,
    alpha: f64,
) -> Result<(InverseHessianApprox, SoftQnScratch), QnError> {
    check_dim(h, pair)?;
    if !alpha.is_finite() {
        return Err(QnError::NonFinite("alpha"));
    }
    if alpha <= 0.0 {
        return Err(QnError::InvalidArgument(format!(
            "penalty must be positive, got {alpha}"
        )));
    }
    let hm = h.matrix();
    let s = pair.s();
    let y = pair.y();
    let hy = hm.mul_vec(y);
    let yhy = y.dot(&hy);
    let sty = pair.sty();
    let gamma = soft_qn_gamma(alpha, yhy, sty)?;

    // Expanding vvᵀ with γ² = γ + α yᵀHy + α²(sᵀy)² gives
    //   H⁺ = H − a·Hy(Hy)ᵀ − c·(s(Hy)ᵀ + Hy sᵀ) + d·ssᵀ
    // with bounded coefficients, avoiding the O(α‖s‖²) cancellation of the
    // direct form. Sign flips of s or y leave every product bit-identical.
    let g2 = gamma * gamma;
    let a = alpha / g2;
    let c = alpha * alpha * sty / g2;
    let d = alpha * (gamma + alpha * yhy) / g2;

    let n = h.dim();
    let mut m = hm.matrix().clone();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] += d * s[i] * s[j] - c * (s[i] * hy[j] + hy[i] * s[j]) - a * hy[i] * hy[j];
        }
    }
    let next = SymMat::symmetrized(m);
    if !next.is_finite() {
        return Err(QnError::NonFinite("soft QN result"));
    }
    if next.cholesky().is_none() {
        return Err(QnError::Internal(
            "soft QN update lost positive definiteness",
        ));
    }
    let u = (&hy + s * (alpha * sty)) / gamma;
    Ok((
        InverseHessianApprox::from_checked(next),
        SoftQnScratch { gamma, u },
    ))
}

/// Standard BFGS inverse update
/// `(I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ` with `ρ = 1/sᵀy`.
///
/// Rejects pairs with `sᵀy ≤ 1e-12·‖s‖‖y‖`; the caller decides whether to
/// skip the update.
pub fn bfgs_update(
    h: &InverseHessianApprox,
    pair: &CurvaturePair,
) -> Result<InverseHessianApprox, QnError> {
    check_dim(h, pair)?;
    let sty = pair.sty();
    let tol = BFGS_CURVATURE_RTOL * pair.s().norm() * pair.y().norm();
    if sty <= tol {
        return Err(QnError::Curvature { sty, tol });
    }
    let rho = 1.0 / sty;
    let hy = h.matrix().mul_vec(pair.y());
    let yhy = pair.y().dot(&hy);
    let next = rank_two(h.matrix(), pair.s(), &hy, rho, rho * rho * yhy + rho);
    finish(next)
}

/// SP-BFGS penalty coefficients `π = 1/(sᵀy + 1/β)` and `ω = 1/(sᵀy + 2/β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpBfgsCoefficients {
    pub pi: f64,
    pub omega: f64,
}

pub fn sp_bfgs_coefficients(sty: f64, beta: f64) -> Result<SpBfgsCoefficients, QnError> {
    if !(sty.is_finite() && beta.is_finite()) {
        return Err(QnError::NonFinite("SP-BFGS coefficient arguments"));
    }
    if beta <= 0.0 {
        return Err(QnError::InvalidArgument(format!(
            "SP-BFGS penalty must be positive, got {beta}"
        )));
    }
    let inv = 1.0 / beta;
    let pi_den = sty + inv;
    let omega_den = sty + 2.0 * inv;
    for den in [pi_den, omega_den] {
        if den.abs() <= SP_BFGS_SINGULAR_TOL {
            return Err(QnError::Singular(den));
        }
    }
    Ok(SpBfgsCoefficients {
        pi: 1.0 / pi_den,
        omega: 1.0 / omega_den,
    })
}

/// SP-BFGS update
/// `(I − ωsyᵀ) H (I − ωysᵀ) + ω(π/ω + (π − ω)yᵀHy) ssᵀ`.
///
/// Positive definiteness is only guaranteed for `sᵀy > −1/β`; pairs at or
/// below that threshold are rejected.
pub fn sp_bfgs_update(
    h: &InverseHessianApprox,
    pair: &CurvaturePair,
    beta: f64,
) -> Result<InverseHessianApprox, QnError> {
    check_dim(h, pair)?;
    let sty = pair.sty();
    if !(beta.is_finite() && beta > 0.0) {
        return Err(QnError::InvalidArgument(format!(
            "SP-BFGS penalty must be positive and finite, got {beta}"
        )));
    }
    let threshold = -1.0 / beta;
    let tol = 1e-12 * (threshold.abs() + sty.abs());
    if sty <= threshold + tol {
        return Err(QnError::PdThreshold { sty, threshold });
    }
    let SpBfgsCoefficients { pi, omega } = sp_bfgs_coefficients(sty, beta)?;
    let hy = h.matrix().mul_vec(pair.y());
    let yhy = pair.y().dot(&hy);
    // ω²yᵀHy + π + ω(π − ω)yᵀHy collapses to π(1 + ω yᵀHy).
    let ss_coef = pi * (1.0 + omega * yhy);
    let next = rank_two(h.matrix(), pair.s(), &hy, omega, ss_coef);
    finish(next)
}

/// Quasi-Newton search direction `−(H + λI)g`.
pub fn biased_direction(
    h: &InverseHessianApprox,
    g: &Vector,
    lambda: f64,
) -> Result<Vector, QnError> {
    if g.len() != h.dim() {
        return Err(QnError::Dimension {
            expected: h.dim(),
            got: g.len(),
        });
    }
    let hg = h.matrix().mul_vec(g);
    Ok(-(hg + g * lambda))
}

/// `H − c(s(Hy)ᵀ + (Hy)sᵀ) + d·ssᵀ`, the common shape of BFGS and SP-BFGS.
fn rank_two(h: &SymMat, s: &Vector, hy: &Vector, c: f64, d: f64) -> DMatrix<f64> {
    let n = h.dim();
    let mut m = h.matrix().clone();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] += d * s[i] * s[j] - c * (s[i] * hy[j] + hy[i] * s[j]);
        }
    }
    m
}

fn finish(m: DMatrix<f64>) -> Result<InverseHessianApprox, QnError> {
    let next = SymMat::symmetrized(m);
    if !next.is_finite() {
        return Err(QnError::NonFinite("update result"));
    }
    InverseHessianApprox::new(next)
}

fn check_dim(h: &InverseHessianApprox, pair: &CurvaturePair) -> Result<(), QnError> {
    if h.dim() != pair.dim() {
        return Err(QnError::Dimension {
            expected: h.dim(),
            got: pair.dim(),
        });
    }
    Ok(())
}
