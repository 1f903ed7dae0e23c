//! Separable two-dimensional function with one maximum, four saddles and
//! four minima:
//! `(x−0.7)²((x+0.7)²+0.1) + (y+0.7)²((y−0.7)²+0.1)`.

use std::sync::Arc;

use super::{Objective, Problem};
use crate::linalg::{SymMat, Vector};

const C: f64 = 0.7;

/// `a(t) = (t−0.7)²((t+0.7)²+0.1)`; the `y` factor is `a(−y)`.
pub fn factor(t: f64) -> f64 {
    let p = (t - C).powi(2);
    let q = (t + C).powi(2) + 0.1;
    p * q
}

pub fn factor_d1(t: f64) -> f64 {
    let q = (t + C).powi(2) + 0.1;
    2.0 * (t - C) * q + 2.0 * (t - C).powi(2) * (t + C)
}

pub fn factor_d2(t: f64) -> f64 {
    let q = (t + C).powi(2) + 0.1;
    2.0 * q + 8.0 * (t - C) * (t + C) + 2.0 * (t - C).powi(2)
}

#[derive(Debug, Clone, Copy)]
pub struct Toy2d;

impl Objective for Toy2d {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &Vector) -> f64 {
        factor(x[0]) + factor(-x[1])
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_column_slice(&[factor_d1(x[0]), -factor_d1(-x[1])])
    }

    fn hessian(&self, x: &Vector) -> Option<SymMat> {
        Some(SymMat::from_diagonal(&[factor_d2(x[0]), factor_d2(-x[1])]))
    }

    fn has_hessian(&self) -> bool {
        true
    }
}

/// Global minimum 0 at `(0.7, −0.7)`; default start `(−0.05, 0.08)`.
pub fn toy_2d() -> Problem {
    Problem::new("TOY2D", Vector::from_column_slice(&[-0.05, 0.08]), Arc::new(Toy2d))
        .expect("dimension 2")
        .with_optimum(0.0, Some(Vector::from_column_slice(&[C, -C])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::testutil::assert_gradient_matches;

    #[test]
    fn global_minimum() {
        let p = toy_2d();
        let xs = Vector::from_column_slice(&[0.7, -0.7]);
        assert_eq!(p.phi(&xs), 0.0);
        assert_eq!(p.grad(&xs).norm(), 0.0);
    }

    #[test]
    fn hessian_at_reference_point() {
        let h = toy_2d()
            .hess(&Vector::from_column_slice(&[0.543, 0.0574]))
            .unwrap();
        let d = h.matrix().diagonal();
        assert!((d[0] - 1.78).abs() < 0.005, "{}", d[0]);
        assert!((d[1] + 1.72).abs() < 0.005, "{}", d[1]);
        assert_eq!(h.matrix()[(0, 1)], 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = toy_2d();
        for &(a, b) in &[(0.1, -0.3), (-0.9, 0.4), (0.543, 0.0574), (1.2, -1.1)] {
            let x = Vector::from_column_slice(&[a, b]);
            assert_gradient_matches(&p, &x, 1e-7);
            let h = p.hess(&x).unwrap();
            for (i, t) in [a, -b].into_iter().enumerate() {
                let fd = (factor_d1(t + 1e-6) - factor_d1(t - 1e-6)) / 2e-6;
                assert!((h.matrix()[(i, i)] - fd).abs() < 1e-6);
            }
        }
    }

    /// Bisection on sign changes of `a'` over a fine grid.
    fn critical_points_1d() -> Vec<f64> {
        let grid: Vec<f64> = (0..=4000).map(|k| -2.0 + k as f64 * 1e-3).collect();
        let mut roots = Vec::new();
        for w in grid.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            if factor_d1(lo) == 0.0 {
                roots.push(lo);
                continue;
            }
            if factor_d1(lo).signum() == factor_d1(hi).signum() {
                continue;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if factor_d1(lo).signum() == factor_d1(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        roots
    }

    #[test]
    fn critical_point_census() {
        let roots = critical_points_1d();
        assert_eq!(roots.len(), 3);
        let p = toy_2d();
        let (mut minima, mut maxima, mut saddles) = (0, 0, 0);
        for &rx in &roots {
            for &ry in &roots {
                // y factor is a(−y): its critical points are −roots
                let x = Vector::from_column_slice(&[rx, -ry]);
                assert!(p.grad(&x).norm() < 1e-9);
                let ev = p.hess(&x).unwrap().eigenvalues();
                match (ev[0] > 0.0, ev[1] > 0.0) {
                    (true, true) => minima += 1,
                    (false, false) => maxima += 1,
                    _ => saddles += 1,
                }
            }
        }
        assert_eq!((minima, maxima, saddles), (4, 1, 4));
    }
}
