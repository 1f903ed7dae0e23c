//! Bounded-noise oracles: `f(x) = φ(x) + n_f`, `g(x) = ∇φ(x) + n_g`.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Problem;
use crate::error::ProblemError;
use crate::linalg::{SymMat, Vector};
use crate::rng::{stream_rng, StreamRng, FUN_NOISE_STREAM, GRAD_NOISE_STREAM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// `n ~ N(0, cov_scale·I)`.
    GaussianGrad(f64),
    /// `n` uniform on the sphere of radius `e_g`.
    SphereGrad(f64),
    /// `n` uniform on `[−e_f, e_f]`.
    UniformFun(f64),
    /// Gradient replaced by a sampled gradient over this many data points.
    Minibatch(usize),
}

impl NoiseModel {
    fn name(&self) -> &'static str {
        match self {
            NoiseModel::None => "None",
            NoiseModel::GaussianGrad(_) => "GaussianGrad",
            NoiseModel::SphereGrad(_) => "SphereGrad",
            NoiseModel::UniformFun(_) => "UniformFun",
            NoiseModel::Minibatch(_) => "Minibatch",
        }
    }

    fn validate(&self) -> Result<(), ProblemError> {
        let bad = |v: f64| !(v.is_finite() && v >= 0.0);
        match *self {
            NoiseModel::GaussianGrad(v) | NoiseModel::SphereGrad(v) | NoiseModel::UniformFun(v)
                if bad(v) =>
            {
                Err(ProblemError::Input(format!("{} parameter must be finite and >= 0, got {v}", self.name())))
            }
            NoiseModel::Minibatch(0) => Err(ProblemError::Input("minibatch size must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

/// A problem seen through noisy function and gradient channels. Counts
/// every noisy call; the `true_*` methods are free.
#[derive(Debug)]
pub struct NoisyOracle {
    base: Problem,
    fun_noise: NoiseModel,
    grad_noise: NoiseModel,
    seed: u64,
    fun_rng: StreamRng,
    grad_rng: StreamRng,
    fun_evals: usize,
    grad_evals: usize,
}

/// Wraps `p` with the given noise channels. The function channel accepts
/// `None`, `UniformFun` and `GaussianGrad` (as scalar Gaussian noise); the
/// gradient channel accepts `None`, `GaussianGrad`, `SphereGrad` and
/// `Minibatch` (finite-sum problems only).
pub fn make_noisy(
    p: Problem,
    fun_noise: NoiseModel,
    grad_noise: NoiseModel,
    seed: u64,
) -> Result<NoisyOracle, ProblemError> {
    fun_noise.validate()?;
    grad_noise.validate()?;
    if matches!(fun_noise, NoiseModel::SphereGrad(_) | NoiseModel::Minibatch(_)) {
        return Err(ProblemError::Noise(fun_noise.name()));
    }
    match grad_noise {
        NoiseModel::UniformFun(_) => return Err(ProblemError::Noise(grad_noise.name())),
        NoiseModel::Minibatch(_) => {
            let mut probe = stream_rng(0, &[]);
            if p.objective().sampled_gradient(p.x0(), 1, &mut probe).is_none() {
                return Err(ProblemError::Noise(grad_noise.name()));
            }
        }
        _ => {}
    }
    Ok(NoisyOracle {
        base: p,
        fun_noise,
        grad_noise,
        seed,
        fun_rng: stream_rng(seed, &[FUN_NOISE_STREAM]),
        grad_rng: stream_rng(seed, &[GRAD_NOISE_STREAM]),
        fun_evals: 0,
        grad_evals: 0,
    })
}

/// Uniform draw on the sphere of radius `r` in `n` dimensions.
pub fn sphere_draw<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64) -> Vector {
    loop {
        let z = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = z.norm();
        if norm > 0.0 {
            return z * (r / norm);
        }
    }
}

impl NoisyOracle {
    /// Noisy function value; counts one evaluation.
    pub fn f(&mut self, x: &Vector) -> f64 {
        self.fun_evals += 1;
        let phi = self.base.phi(x);
        match self.fun_noise {
            NoiseModel::UniformFun(e) if e > 0.0 => phi + self.fun_rng.random_range(-e..=e),
            NoiseModel::GaussianGrad(v) if v > 0.0 => {
                phi + v.sqrt() * self.fun_rng.sample::<f64, _>(StandardNormal)
            }
            _ => phi,
        }
    }

    /// Noisy gradient; counts one evaluation.
    pub fn g(&mut self, x: &Vector) -> Vector {
        self.grad_evals += 1;
        let n = self.base.dim();
        match self.grad_noise {
            NoiseModel::Minibatch(batch) => self
                .base
                .objective()
                .sampled_gradient(x, batch, &mut self.grad_rng)
                .expect("checked at construction"),
            NoiseModel::GaussianGrad(v) if v > 0.0 => {
                let sd = v.sqrt();
                let mut g = self.base.grad(x);
                for gi in g.iter_mut() {
                    *gi += sd * self.grad_rng.sample::<f64, _>(StandardNormal);
                }
                g
            }
            NoiseModel::SphereGrad(e) if e > 0.0 => self.base.grad(x) + sphere_draw(&mut self.grad_rng, n, e),
            _ => self.base.grad(x),
        }
    }

    pub fn true_phi(&self, x: &Vector) -> f64 {
        self.base.phi(x)
    }

    pub fn true_grad(&self, x: &Vector) -> Vector {
        self.base.grad(x)
    }

    pub fn true_hess(&self, x: &Vector) -> Option<SymMat> {
        self.base.hess(x)
    }

    pub fn problem(&self) -> &Problem {
        &self.base
    }

    pub fn fun_noise(&self) -> NoiseModel {
        self.fun_noise
    }

    pub fn grad_noise(&self) -> NoiseModel {
        self.grad_noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fun_evals(&self) -> usize {
        self.fun_evals
    }

    pub fn grad_evals(&self) -> usize {
        self.grad_evals
    }
}
