#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use softqn::rng::{stream_rng, StreamRng};
use softqn::{CurvaturePair, InverseHessianApprox, SymMat, Vector};

pub fn rng(seed: u64) -> StreamRng {
    stream_rng(seed, &[0xC0DE])
}

pub fn gaussian_vec(rng: &mut StreamRng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_mat(rng: &mut StreamRng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn orthogonal(rng: &mut StreamRng, n: usize) -> DMatrix<f64> {
    gaussian_mat(rng, n).qr().q()
}

/// `Q diag(eig) Qᵀ` with a random orthogonal `Q`.
pub fn with_spectrum(rng: &mut StreamRng, eig: &[f64]) -> SymMat {
    let n = eig.len();
    let q = orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&Vector::from_column_slice(eig));
    SymMat::new(&q * d * q.transpose()).unwrap()
}

/// Random PD matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_pd(rng: &mut StreamRng, n: usize, lo: f64, hi: f64) -> InverseHessianApprox {
    let eig: Vec<f64> = (0..n)
        .map(|_| (rng.random_range(lo.ln()..=hi.ln())).exp())
        .collect();
    InverseHessianApprox::new(with_spectrum(rng, &eig)).unwrap()
}

/// Random pair with log-uniform scales; sometimes zero or with `sᵀy < 0`.
pub fn random_pair(rng: &mut StreamRng, n: usize) -> CurvaturePair {
    let ss = 10f64.powf(rng.random_range(-3.0..3.0));
    let ys = 10f64.powf(rng.random_range(-3.0..3.0));
    let mut s = gaussian_vec(rng, n, ss);
    let mut y = gaussian_vec(rng, n, ys);
    match rng.random_range(0..10) {
        0 => s.fill(0.0),
        1 => y.fill(0.0),
        // Force negative curvature.
        2 if s.dot(&y) > 0.0 => y = -y,
        _ => {}
    }
    CurvaturePair::new(s, y).unwrap()
}

pub fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}
