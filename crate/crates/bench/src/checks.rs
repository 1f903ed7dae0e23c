//! Randomized invariant checks of the quasi-Newton updates, runnable from
//! the CLI without the test harness.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use softqn::rng::{stream_rng, StreamRng};
use softqn::{
    bfgs_update, lambda_max_upper_bound, soft_qn_update, CurvaturePair, InverseHessianApprox, SymMat, Vector,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest violation seen (check-specific units; 0 when none).
    pub worst: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn normal_vec(r: &mut StreamRng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| r.sample(StandardNormal))
}

fn log_uniform(r: &mut StreamRng, lo: f64, hi: f64) -> f64 {
    10f64.powf(r.random_range(lo.log10()..=hi.log10()))
}

/// `Q diag(λ) Qᵀ` with random orthogonal `Q` and log-uniform `λ ∈ [lo, hi]`.
pub fn random_pd(r: &mut StreamRng, n: usize, lo: f64, hi: f64) -> InverseHessianApprox {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| r.sample(StandardNormal));
    let q = g.qr().q();
    let lam = Vector::from_fn(n, |_, _| log_uniform(r, lo, hi));
    let m: DMatrix<f64> = &q * DMatrix::from_diagonal(&lam) * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    InverseHessianApprox::new(SymMat::new(m).expect("symmetric")).expect("positive definite")
}

/// Random pair with log-uniform scales; about one case in ten has
/// `sᵀy < 0` forced, one in ten `s = 0` and one in ten `y = 0`.
pub fn random_pair(r: &mut StreamRng, n: usize) -> CurvaturePair {
    let mut s = normal_vec(r, n) * log_uniform(r, 1e-3, 1e3);
    let mut y = normal_vec(r, n) * log_uniform(r, 1e-3, 1e3);
    match r.random_range(0..10) {
        0 => s.fill(0.0),
        1 => y.fill(0.0),
        2 if s.dot(&y) > 0.0 => y = -y,
        _ => {}
    }
    CurvaturePair::new(s, y).expect("finite pair")
}

fn report(name: &'static str, cases: usize, violations: impl Iterator<Item = f64>) -> CheckReport {
    let mut failures = 0;
    let mut worst = 0.0f64;
    for v in violations {
        if v > 0.0 {
            failures += 1;
            worst = worst.max(v);
        }
    }
    CheckReport {
        name,
        cases,
        failures,
        worst,
    }
}

/// Soft QN output passes Cholesky for PD `H`, any pair and
/// `α ∈ [1e-8, 1e8]`. A failure counts as violation 1.
pub fn positive_definiteness(cases: usize, seed: u64) -> CheckReport {
    let violations = (0..cases as u64).map(|i| {
        let mut r = stream_rng(seed, &[1, i]);
        let n = r.random_range(1..=20);
        let h = random_pd(&mut r, n, 1e-2, 1e2);
        let pair = random_pair(&mut r, n);
        let alpha = log_uniform(&mut r, 1e-8, 1e8);
        match soft_qn_update(&h, &pair, alpha) {
            Ok((next, _)) if next.matrix().cholesky().is_some() => 0.0,
            _ => 1.0,
        }
    });
    report("soft QN keeps H positive definite", cases, violations)
}

/// `λ_max(A) ≤ lambda_max_upper_bound(A)` on random symmetric matrices;
/// violation is the excess.
pub fn eigenvalue_bound(cases: usize, seed: u64) -> CheckReport {
    let violations = (0..cases as u64).map(|i| {
        let mut r = stream_rng(seed, &[2, i]);
        let n = r.random_range(1..=12);
        let scale = log_uniform(&mut r, 1e-2, 1e2);
        let g = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal) * scale);
        let a = SymMat::new(&g + g.transpose()).expect("symmetric");
        let ev = a.eigenvalues();
        let top = ev[ev.len() - 1];
        let excess = top - lambda_max_upper_bound(&a);
        if excess > 1e-10 * (1.0 + top.abs()) {
            excess
        } else {
            0.0
        }
    });
    report("trace bound dominates the largest eigenvalue", cases, violations)
}

/// Negating `s` or `y` leaves the soft QN update unchanged within 1e-14.
pub fn sign_symmetry(cases: usize, seed: u64) -> CheckReport {
    let violations = (0..cases as u64).map(|i| {
        let mut r = stream_rng(seed, &[3, i]);
        let n = r.random_range(1..=10);
        let h = random_pd(&mut r, n, 0.1, 10.0);
        let pair = random_pair(&mut r, n);
        let alpha = log_uniform(&mut r, 1e-4, 1e4);
        let base = soft_qn_update(&h, &pair, alpha).expect("update").0;
        let flips = [
            CurvaturePair::new(pair.s().clone(), -pair.y()).expect("finite"),
            CurvaturePair::new(-pair.s(), pair.y().clone()).expect("finite"),
        ];
        flips
            .iter()
            .map(|p| {
                let m = soft_qn_update(&h, p, alpha).expect("update").0;
                (m.matrix().matrix() - base.matrix().matrix()).norm()
            })
            .fold(0.0f64, f64::max)
            .max(1e-14)
            - 1e-14
    });
    report("sign flips of s or y give the same update", cases, violations)
}

/// Distance to the BFGS update is non-increasing over `α = 1e2..1e12` and
/// relatively at most 1e-3 at the end, for pairs with `sᵀy > 0`.
pub fn bfgs_limit(cases: usize, seed: u64) -> CheckReport {
    let violations = (0..cases as u64).map(|i| {
        let mut r = stream_rng(seed, &[4, i]);
        let n = r.random_range(1..=8);
        let h = random_pd(&mut r, n, 0.5, 2.0);
        let s = normal_vec(&mut r, n);
        let mut y = &s * r.random_range(0.5..2.0) + normal_vec(&mut r, n) * 0.2;
        if s.dot(&y) <= 0.1 * s.norm() * y.norm() {
            y = s.clone();
        }
        let pair = CurvaturePair::new(s, y).expect("finite");
        let target = bfgs_update(&h, &pair).expect("positive curvature");
        let scale = target.matrix().frobenius_norm();
        let mut prev = f64::INFINITY;
        let mut worst = 0.0f64;
        for e in 2..=12 {
            let soft = soft_qn_update(&h, &pair, 10f64.powi(e)).expect("update").0;
            let d = (soft.matrix().matrix() - target.matrix().matrix()).norm() / scale;
            worst = worst.max(d - prev * (1.0 + 1e-9) - 1e-12);
            prev = d;
        }
        worst.max(prev - 1e-3).max(0.0)
    });
    report("soft QN approaches BFGS as the penalty grows", cases, violations)
}

/// All checks with `cases` draws each.
pub fn run_all(cases: usize, seed: u64) -> Vec<CheckReport> {
    vec![
        positive_definiteness(cases, seed),
        eigenvalue_bound(cases, seed),
        sign_symmetry(cases, seed),
        bfgs_limit(cases, seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        for rep in run_all(200, 3) {
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(rep.cases, 200);
        }
    }
}
