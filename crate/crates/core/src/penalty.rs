//! Penalty-parameter selection for soft QN and SP-BFGS, including the
//! eigenvalue-bound machinery that keeps soft QN iterates inside a band.

use crate::error::QnError;
use crate::linalg::{CurvaturePair, InverseHessianApprox, SymMat};

/// Smallest penalty a policy will hand out. At this magnitude the soft QN
/// update is the identity map in floating point.
pub const ALPHA_FLOOR: f64 = f64::MIN_POSITIVE;

/// Spectral band `ψ I ⪯ H ⪯ Ψ I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBounds {
    psi: f64,
    psi_upper: f64,
}

impl EigenBounds {
    pub fn new(psi: f64, psi_upper: f64) -> Result<Self, QnError> {
        if !(psi > 0.0 && psi <= psi_upper && psi_upper.is_finite()) {
            return Err(QnError::InvalidArgument(format!(
                "eigenvalue bounds need 0 < psi <= Psi < inf, got ({psi}, {psi_upper})"
            )));
        }
        Ok(Self { psi, psi_upper })
    }

    /// Lower eigenvalue floor ψ.
    pub fn lower(&self) -> f64 {
        self.psi
    }

    /// Upper eigenvalue cap Ψ.
    pub fn upper(&self) -> f64 {
        self.psi_upper
    }
}

/// Largest penalty for which the soft QN update provably keeps the spectrum
/// inside `bounds`:
///
/// `min{ (λ_lo − ψ)/(‖s‖ + ‖Hy‖)², (Ψ − λ_hi)/‖s‖² }`
///
/// where `λ_lo ≤ λ_min(H)` and `λ_hi ≥ λ_max(H)`. A zero denominator removes
/// its term; if both vanish the result is `+∞` (the update is the identity).
/// Returns 0 when the supplied spectrum estimates already violate the band.
pub fn soft_qn_alpha_bound(
    h: &InverseHessianApprox,
    pair: &CurvaturePair,
    bounds: &EigenBounds,
    lam_min: f64,
    lam_max: f64,
) -> f64 {
    if lam_min < bounds.lower() || lam_max > bounds.upper() {
        return 0.0;
    }
    let s_norm = pair.s().norm();
    let hy_norm = h.matrix().mul_vec(pair.y()).norm();
    let lower_den = (s_norm + hy_norm).powi(2);
    let upper_den = s_norm * s_norm;
    let lower_term = if lower_den > 0.0 {
        (lam_min - bounds.lower()) / lower_den
    } else {
        f64::INFINITY
    };
    let upper_term = if upper_den > 0.0 {
        (bounds.upper() - lam_max) / upper_den
    } else {
        f64::INFINITY
    };
    lower_term.min(upper_term)
}

/// Wolkowicz–Styan upper bound on the largest eigenvalue of a symmetric
/// matrix: `m + σ√(n−1)` with `m = tr(A)/n` and `σ² = tr(A²)/n − m²`.
/// Costs O(n²).
pub fn lambda_max_upper_bound(a: &SymMat) -> f64 {
    let n = a.dim();
    if n == 1 {
        return a.matrix()[(0, 0)];
    }
    let nf = n as f64;
    let m = a.trace() / nf;
    let spread = (a.trace_of_square() / nf - m * m).max(0.0).sqrt();
    m + spread * (nf - 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SoftQnPenaltyMode {
    Constant(f64),
    /// Clamp by the eigenvalue-band bound using cheap spectrum estimates:
    /// `λ_hi` from [`lambda_max_upper_bound`] and `λ_lo = ψ + λ_bias`.
    Lemma1Bounded { bounds: EigenBounds, alpha_cap: f64 },
}

/// How soft QN picks `α_k`, plus the bias `λ` added to `H` when forming
/// search directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftQnPenaltyPolicy {
    pub mode: SoftQnPenaltyMode,
    pub bias_lambda: f64,
}

impl SoftQnPenaltyPolicy {
    pub fn constant(alpha: f64) -> Self {
        Self {
            mode: SoftQnPenaltyMode::Constant(alpha),
            bias_lambda: 0.0,
        }
    }

    pub fn with_bias(mut self, lambda: f64) -> Self {
        self.bias_lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<(), QnError> {
        if !(self.bias_lambda >= 0.0 && self.bias_lambda.is_finite()) {
            return Err(QnError::InvalidArgument(format!(
                "bias must be non-negative, got {}",
                self.bias_lambda
            )));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match self.mode {
            SoftQnPenaltyMode::Constant(a) if !positive(a) => Err(QnError::InvalidArgument(
                format!("constant penalty must be positive, got {a}"),
            )),
            SoftQnPenaltyMode::Lemma1Bounded { alpha_cap, .. } if !positive(alpha_cap) => {
                Err(QnError::InvalidArgument(format!(
                    "penalty cap must be positive, got {alpha_cap}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Penalty for this pair; always strictly positive and finite.
    pub fn alpha(&self, h: &InverseHessianApprox, pair: &CurvaturePair) -> f64 {
        match self.mode {
            SoftQnPenaltyMode::Constant(a) => a,
            SoftQnPenaltyMode::Lemma1Bounded { bounds, alpha_cap } => {
                let lam_max = lambda_max_upper_bound(h.matrix());
                let lam_min = bounds.lower() + self.bias_lambda;
                let bound = soft_qn_alpha_bound(h, pair, &bounds, lam_min, lam_max);
                bound.min(alpha_cap).max(ALPHA_FLOOR)
            }
        }
    }
}

/// How SP-BFGS picks `β_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpBfgsPenaltyPolicy {
    Constant(f64),
    /// `β = coeff·‖s‖₂ + floor`.
    StepNormScaled { coeff: f64, floor: f64 },
    /// `constant_beta` while `sᵀy ≥ 0`, otherwise `relax_factor/(−sᵀy)`,
    /// which keeps `sᵀy > −1/β` for `0 < relax_factor < 1`.
    CurvatureRelaxed { constant_beta: f64, relax_factor: f64 },
}

impl SpBfgsPenaltyPolicy {
    pub fn validate(&self) -> Result<(), QnError> {
        let ok = match *self {
            Self::Constant(b) => b > 0.0 && b.is_finite(),
            Self::StepNormScaled { coeff, floor } => {
                coeff >= 0.0 && floor > 0.0 && coeff.is_finite() && floor.is_finite()
            }
            Self::CurvatureRelaxed {
                constant_beta,
                relax_factor,
            } => constant_beta > 0.0 && relax_factor > 0.0 && relax_factor < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(QnError::InvalidArgument(format!(
                "invalid SP-BFGS penalty policy {self:?}"
            )))
        }
    }

    pub fn beta(&self, pair: &CurvaturePair) -> f64 {
        match *self {
            Self::Constant(b) => b,
            Self::StepNormScaled { coeff, floor } => coeff * pair.s().norm() + floor,
            Self::CurvatureRelaxed {
                constant_beta,
                relax_factor,
            } => {
                let sty = pair.sty();
                if sty < 0.0 {
                    relax_factor / (-sty)
                } else {
                    constant_beta
                }
            }
        }
    }
}
