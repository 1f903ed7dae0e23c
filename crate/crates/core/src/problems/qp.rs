//! Random strongly convex quadratics `½xᵀHx + bᵀx` with minimizer `𝟏`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Objective, Problem};
use crate::error::ProblemError;
use crate::linalg::{SymMat, Vector};
use crate::rng::{stream_rng, PROBLEM_STREAM};

/// Smallest and largest eigenvalue of every generated Hessian.
pub const QP_EIG_MIN: f64 = 0.01;
pub const QP_EIG_MAX: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct Quadratic {
    h: SymMat,
    b: Vector,
}

impl Quadratic {
    pub fn new(h: SymMat, b: Vector) -> Result<Self, ProblemError> {
        if h.dim() != b.len() {
            return Err(ProblemError::Input("Hessian and linear term disagree in size".into()));
        }
        Ok(Self { h, b })
    }

    pub fn hessian_matrix(&self) -> &SymMat {
        &self.h
    }

    pub fn linear_term(&self) -> &Vector {
        &self.b
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.h.quad_form(x) + self.b.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.h.mul_vec(x) + &self.b
    }

    fn hessian(&self, _x: &Vector) -> Option<SymMat> {
        Some(self.h.clone())
    }

    fn has_hessian(&self) -> bool {
        true
    }
}

/// Random quadratic with eigenvectors from the QR factor of a Gaussian
/// matrix, spectrum `{0.01, 1, U[0.01, 1]ⁿ⁻²}` and `b = −H𝟏`, so the
/// minimizer is `𝟏`. Start point is `𝟎`.
pub fn gen_random_qp(n: usize, seed: u64) -> Result<Problem, ProblemError> {
    let (problem, _) = gen_random_qp_with_spectrum(n, seed)?;
    Ok(problem)
}

/// Same as [`gen_random_qp`], also returning the eigenvalues used.
pub fn gen_random_qp_with_spectrum(n: usize, seed: u64) -> Result<(Problem, Vec<f64>), ProblemError> {
    if n < 2 {
        return Err(ProblemError::Input(format!("random QP needs n >= 2, got {n}")));
    }
    let mut rng = stream_rng(seed, &[PROBLEM_STREAM]);
    let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = gauss.qr().q();

    let mut eig = Vec::with_capacity(n);
    eig.push(QP_EIG_MIN);
    eig.push(QP_EIG_MAX);
    for _ in 2..n {
        eig.push(rng.random_range(QP_EIG_MIN..=QP_EIG_MAX));
    }
    let d = DMatrix::from_diagonal(&Vector::from_column_slice(&eig));
    let h = SymMat::new(&q * d * q.transpose()).expect("square");
    let ones = Vector::from_element(n, 1.0);
    let b = -h.mul_vec(&ones);
    let quad = Quadratic::new(h, b)?;
    let phi_star = quad.value(&ones);
    let problem = Problem::new(format!("QP{n}"), Vector::zeros(n), Arc::new(quad))?
        .with_optimum(phi_star, Some(ones));
    Ok((problem, eig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::testutil::assert_gradient_matches;

    #[test]
    fn minimizer_is_ones() {
        for seed in 0..5 {
            let p = gen_random_qp(8, seed).unwrap();
            let ones = Vector::from_element(8, 1.0);
            assert!(p.grad(&ones).norm() < 1e-13);
            assert_eq!(p.phi(&ones), p.phi_star().unwrap());
        }
    }

    #[test]
    fn spectrum_pinned() {
        for seed in 0..100 {
            let (p, _) = gen_random_qp_with_spectrum(12, seed).unwrap();
            let ev = p.hess(p.x0()).unwrap().eigenvalues();
            assert!((ev[0] - QP_EIG_MIN).abs() < 1e-12);
            assert!((ev[ev.len() - 1] - QP_EIG_MAX).abs() < 1e-12);
            assert!(((ev[ev.len() - 1] / ev[0]) - 100.0).abs() < 1e-8);
        }
    }

    #[test]
    fn initial_gap_is_half_quadratic_form() {
        for seed in 0..10 {
            let p = gen_random_qp(6, seed).unwrap();
            let ones = Vector::from_element(6, 1.0);
            let gap = p.phi(&Vector::zeros(6)) - p.phi(&ones);
            let half = 0.5 * p.hess(&ones).unwrap().quad_form(&ones);
            assert!((gap - half).abs() < 1e-12 * half.max(1.0));
            assert!(gap > 0.0);
        }
    }

    #[test]
    fn gradient_and_rejection() {
        let p = gen_random_qp(5, 3).unwrap();
        let x = Vector::from_column_slice(&[0.3, -1.0, 2.0, 0.0, 0.7]);
        assert_gradient_matches(&p, &x, 1e-6);
        assert!(gen_random_qp(1, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = gen_random_qp(4, 11).unwrap();
        let b = gen_random_qp(4, 11).unwrap();
        let c = gen_random_qp(4, 12).unwrap();
        let x = Vector::from_element(4, 0.5);
        assert_eq!(a.phi(&x), b.phi(&x));
        assert_ne!(a.phi(&x), c.phi(&x));
    }
}
