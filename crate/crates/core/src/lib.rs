//! Soft quasi-Newton optimization under bounded noise.
//!
//! The soft QN update replaces the secant condition `Bs = y` with a penalty
//! on its violation, which gives a closed-form inverse-Hessian update that
//! stays positive definite for every step pair, including pairs with
//! negative curvature. The crate also provides BFGS and SP-BFGS baselines,
//! a brute-force verifier for the update, benchmark problems with noisy
//! oracles, and the optimization loop with a noise-tolerant line search.
//!
//! ```
//! use softqn::{soft_qn_update, CurvaturePair, InverseHessianApprox};
//!
//! let h = InverseHessianApprox::identity(2);
//! // Negative curvature: BFGS would reject this pair.
//! let pair = CurvaturePair::from_slices(&[1.0, 0.0], &[-0.5, 0.2]).unwrap();
//! let (next, scratch) = soft_qn_update(&h, &pair, 0.3).unwrap();
//! assert!(next.matrix().is_positive_definite());
//! assert!(scratch.gamma >= 1.0);
//! ```

pub mod error;
pub mod linalg;
pub mod oracle;
pub mod penalty;
pub mod problems;
pub mod rng;
pub mod solver;
pub mod update;

pub use error::{OracleError, ProblemError, QnError, SolverError};
pub use linalg::{CurvaturePair, InverseHessianApprox, SymMat, Vector};
pub use penalty::{
    lambda_max_upper_bound, soft_qn_alpha_bound, EigenBounds, SoftQnPenaltyMode,
    SoftQnPenaltyPolicy, SpBfgsPenaltyPolicy,
};
pub use update::{
    bfgs_update, biased_direction, soft_qn_gamma, soft_qn_update, sp_bfgs_coefficients,
    sp_bfgs_update, SoftQnScratch, SpBfgsCoefficients,
};
