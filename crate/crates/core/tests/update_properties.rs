mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use softqn::linalg::spd_inverse;
use softqn::oracle::{stationarity_residual, PenaltyObjectiveSpec};
use softqn::*;

fn pd_config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(pd_config(10_000))]

    #[test]
    fn soft_qn_stays_positive_definite(seed in any::<u64>(), n in 1usize..=20, log_alpha in -8.0f64..=8.0) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 1e-2, 1e2);
        let pair = random_pair(&mut r, n);
        let alpha = 10f64.powf(log_alpha);
        let (next, scratch) = soft_qn_update(&h, &pair, alpha).unwrap();
        prop_assert!(next.matrix().cholesky().is_some());
        prop_assert!(scratch.gamma >= 1.0);
        if pair.y().norm() > 0.0 {
            prop_assert!(scratch.u.dot(pair.y()) > 0.0);
        }
    }

    #[test]
    fn wolkowicz_styan_bounds_lambda_max(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let m = gaussian_mat(&mut r, n) * r.random_range(0.01..100.0);
        let a = SymMat::new(&m + m.transpose()).unwrap();
        let ev = a.eigenvalues();
        let top = ev[ev.len() - 1];
        prop_assert!(top <= lambda_max_upper_bound(&a) + 1e-10 * (1.0 + top.abs()));
    }
}

proptest! {
    #![proptest_config(pd_config(500))]

    #[test]
    fn update_is_stationary_for_the_penalty_problem(seed in any::<u64>(), n in 1usize..=8, log_alpha in -3.0f64..=3.0) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 0.1, 10.0);
        let s = gaussian_vec(&mut r, n, 1.0);
        let y = gaussian_vec(&mut r, n, 1.0);
        let pair = CurvaturePair::new(s, y).unwrap();
        let alpha = 10f64.powf(log_alpha);
        let (next, _) = soft_qn_update(&h, &pair, alpha).unwrap();
        let b = spd_inverse(next.matrix()).unwrap();
        let spec = PenaltyObjectiveSpec::new(h.matrix().clone(), pair, alpha).unwrap();
        let res = stationarity_residual(&spec, &b).unwrap();
        prop_assert!(res <= 1e-8 * (1.0 + h.matrix().frobenius_norm()), "residual {res:e}");
    }

    #[test]
    fn converges_to_bfgs_as_penalty_grows(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 0.5, 2.0);
        let s = gaussian_vec(&mut r, n, 1.0);
        let mut y = &s * r.random_range(0.5..2.0) + gaussian_vec(&mut r, n, 0.2);
        if s.dot(&y) <= 0.1 * s.norm() * y.norm() {
            y = s.clone();
        }
        let pair = CurvaturePair::new(s, y).unwrap();
        let bfgs = bfgs_update(&h, &pair).unwrap();
        let target = bfgs.matrix().matrix();
        let mut prev = f64::INFINITY;
        for e in (2..=12).step_by(2) {
            let (soft, _) = soft_qn_update(&h, &pair, 10f64.powi(e)).unwrap();
            let d = frob(soft.matrix().matrix(), target);
            prop_assert!(d <= prev * (1.0 + 1e-9) + 1e-12, "alpha 1e{e}: {d:e} after {prev:e}");
            prev = d;
        }
        prop_assert!(prev <= 1e-3 * target.norm());
    }

    #[test]
    fn sign_flips_give_the_same_update(seed in any::<u64>(), n in 1usize..=10, log_alpha in -4.0f64..=4.0) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 0.1, 10.0);
        let pair = random_pair(&mut r, n);
        let alpha = 10f64.powf(log_alpha);
        let (base, _) = soft_qn_update(&h, &pair, alpha).unwrap();
        let flip_y = CurvaturePair::new(pair.s().clone(), -pair.y()).unwrap();
        let flip_s = CurvaturePair::new(-pair.s(), pair.y().clone()).unwrap();
        for other in [flip_y, flip_s] {
            let (m, _) = soft_qn_update(&h, &other, alpha).unwrap();
            prop_assert!(frob(m.matrix().matrix(), base.matrix().matrix()) <= 1e-14);
        }
    }

    #[test]
    fn update_commutes_with_congruence(seed in any::<u64>(), n in 1usize..=8, log_alpha in -2.0f64..=2.0) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 0.2, 5.0);
        let pair = random_pair(&mut r, n);
        let alpha = 10f64.powf(log_alpha);
        let a = DMatrix::identity(n, n) + gaussian_mat(&mut r, n) * (0.3 / (n as f64).sqrt());
        let a_inv_t = a.clone().try_inverse().unwrap().transpose();

        let ht = InverseHessianApprox::new(SymMat::new(&a * h.matrix().matrix() * a.transpose()).unwrap()).unwrap();
        let pt = CurvaturePair::new(&a * pair.s(), &a_inv_t * pair.y()).unwrap();
        let (lhs, _) = soft_qn_update(&ht, &pt, alpha).unwrap();
        let (next, _) = soft_qn_update(&h, &pair, alpha).unwrap();
        let rhs = &a * next.matrix().matrix() * a.transpose();
        let scale = a.norm().powi(2) * next.matrix().frobenius_norm();
        prop_assert!(frob(lhs.matrix().matrix(), &rhs) <= 1e-9 * scale);
    }

    #[test]
    fn sp_bfgs_matches_bfgs_for_large_beta(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let h = random_pd(&mut r, n, 0.5, 2.0);
        let s = gaussian_vec(&mut r, n, 1.0);
        let y = &s * r.random_range(0.5..2.0) + gaussian_vec(&mut r, n, 0.1);
        prop_assume!(s.dot(&y) > 0.05 * s.norm() * y.norm());
        let pair = CurvaturePair::new(s, y).unwrap();
        let b = bfgs_update(&h, &pair).unwrap();
        let sp = sp_bfgs_update(&h, &pair, 1e12).unwrap();
        let scale = b.matrix().frobenius_norm();
        prop_assert!(frob(sp.matrix().matrix(), b.matrix().matrix()) <= 1e-6 * scale);
    }
}

proptest! {
    #![proptest_config(pd_config(20))]

    #[test]
    fn bounded_penalty_keeps_spectrum_in_band(seed in any::<u64>(), n in 2usize..=8) {
        let (psi, psi_hi) = (0.1, 10.0);
        let bounds = EigenBounds::new(psi, psi_hi).unwrap();
        let mut r = rng(seed);
        let mut h = random_pd(&mut r, n, 0.5, 5.0);
        for _ in 0..500 {
            let pair = random_pair(&mut r, n);
            let ev = h.matrix().eigenvalues();
            let bound = soft_qn_alpha_bound(&h, &pair, &bounds, ev[0], ev[n - 1]);
            let alpha = bound.min(1e3);
            if alpha > 0.0 {
                h = soft_qn_update(&h, &pair, alpha).unwrap().0;
            }
            let ev = h.matrix().eigenvalues();
            prop_assert!(ev[0] >= psi - 1e-12, "min eigenvalue {}", ev[0]);
            prop_assert!(ev[n - 1] <= psi_hi + 1e-12, "max eigenvalue {}", ev[n - 1]);
        }
    }
}

#[test]
fn degenerate_pairs_behave() {
    let mut r = rng(5);
    let h = random_pd(&mut r, 4, 0.5, 2.0);
    let zero = CurvaturePair::new(Vector::zeros(4), Vector::zeros(4)).unwrap();
    let (same, scratch) = soft_qn_update(&h, &zero, 3.0).unwrap();
    assert_eq!(same.matrix(), h.matrix());
    assert_eq!(scratch.gamma, 1.0);

    let e1 = Vector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
    let neg = CurvaturePair::new(e1.clone(), -&e1).unwrap();
    assert!(matches!(bfgs_update(&h, &neg), Err(QnError::Curvature { .. })));
    assert!(soft_qn_update(&h, &neg, 1.0).unwrap().0.matrix().is_positive_definite());
}
