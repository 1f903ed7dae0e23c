mod common;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use softqn::oracle::*;
use softqn::*;

fn random_spec(seed: u64, n: usize) -> PenaltyObjectiveSpec {
    let mut r = rng(seed);
    let h = random_pd(&mut r, n, 0.2, 5.0);
    let s = gaussian_vec(&mut r, n, 1.0);
    let y = gaussian_vec(&mut r, n, 1.0);
    let alpha = 10f64.powf(r.random_range(-2.0..=2.0));
    PenaltyObjectiveSpec::new(h.into_matrix(), CurvaturePair::new(s, y).unwrap(), alpha).unwrap()
}

#[test]
fn brute_force_minimizer_matches_closed_form() {
    let mut worst = 0.0f64;
    for seed in 0..120u64 {
        let n = 2 + (seed % 2) as usize;
        let spec = random_spec(seed, n);
        let res = minimize_penalty_objective(&spec, DEFAULT_TOL).unwrap();
        let h = InverseHessianApprox::new(spec.h_prev().clone()).unwrap();
        let (closed, _) = soft_qn_update(&h, spec.pair(), spec.alpha()).unwrap();
        let err = frob(res.h_star.matrix(), closed.matrix().matrix());
        let scale = 1.0 + spec.h_prev().frobenius_norm();
        worst = worst.max(err / scale);
        assert!(err <= 1e-5 * scale, "seed {seed}: {err:e}");
        assert!(res.b_star.is_positive_definite());
        assert!(res.stationarity_residual <= DEFAULT_TOL);
    }
    assert!(worst < 1e-5);
}

#[test]
fn penalty_objective_is_convex_on_segments() {
    for seed in 0..200u64 {
        let n = 2 + (seed % 3) as usize;
        let spec = random_spec(seed, n);
        let mut r = rng(seed ^ 0xABCD);
        let b1 = random_pd(&mut r, n, 0.1, 10.0).into_matrix();
        let b2 = random_pd(&mut r, n, 0.1, 10.0).into_matrix();
        let t: f64 = r.random_range(0.01..0.99);
        let mix = SymMat::new(b1.matrix() * t + b2.matrix() * (1.0 - t)).unwrap();
        let lhs = penalty_objective(&spec, &mix).unwrap();
        let rhs = t * penalty_objective(&spec, &b1).unwrap()
            + (1.0 - t) * penalty_objective(&spec, &b2).unwrap();
        assert!(lhs <= rhs + 1e-10, "seed {seed}: {lhs} > {rhs}");
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let spec = random_spec(seed, n);
        let mut r = rng(seed ^ 0x1234);
        let b = random_pd(&mut r, n, 0.3, 3.0).into_matrix();
        let e = gaussian_mat(&mut r, n);
        let e = (&e + e.transpose()) * 0.5;
        let grad = penalty_gradient(&spec, &b).unwrap();
        let analytic = grad.dot(&e);
        let h = 1e-6;
        let at = |t: f64| {
            let m = SymMat::new(b.matrix() + &e * t).unwrap();
            penalty_objective(&spec, &m).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        assert!(
            (fd - analytic).abs() <= 1e-5 * analytic.abs().max(1.0),
            "seed {seed}: fd {fd} vs {analytic}"
        );
    }
}

#[test]
fn closed_form_beats_previous_matrix() {
    for seed in 0..50u64 {
        let spec = random_spec(seed, 3);
        let h = InverseHessianApprox::new(spec.h_prev().clone()).unwrap();
        let (closed, _) = soft_qn_update(&h, spec.pair(), spec.alpha()).unwrap();
        let b_closed = softqn::linalg::spd_inverse(closed.matrix()).unwrap();
        let b_prev = softqn::linalg::spd_inverse(spec.h_prev()).unwrap();
        let v_closed = penalty_objective(&spec, &b_closed).unwrap();
        let v_prev = penalty_objective(&spec, &b_prev).unwrap();
        assert!(v_closed <= v_prev + 1e-12);
        assert!(stationarity_residual(&spec, &b_prev).unwrap() > 0.0);
    }
}

#[test]
fn worked_two_dimensional_example() {
    let spec = PenaltyObjectiveSpec::new(
        SymMat::identity(2),
        CurvaturePair::from_slices(&[1.0, 0.0], &[0.5, 0.2]).unwrap(),
        0.3,
    )
    .unwrap();
    let res = minimize_penalty_objective(&spec, DEFAULT_TOL).unwrap();
    let (closed, _) = soft_qn_update(&InverseHessianApprox::identity(2), spec.pair(), 0.3).unwrap();
    let diff: DMatrix<f64> = res.h_star.matrix() - closed.matrix().matrix();
    assert!(diff.amax() <= 1e-6);
}
