//! Benchmark problems and the bounded-noise oracle layer.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::ProblemError;
use crate::linalg::{SymMat, Vector};

pub mod cutest;
pub mod logistic;
pub mod noise;
pub mod qp;
pub mod toy;

pub use cutest::{cutest_like, CUTEST_SUBSET};
pub use logistic::{load_libsvm, logistic_problem, minibatch_gradient, parse_libsvm, LogisticDataset};
pub use noise::{make_noisy, NoiseModel, NoisyOracle};
pub use qp::gen_random_qp;
pub use toy::toy_2d;

/// A smooth objective `φ` with analytic gradient.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    /// Exact Hessian, when the problem provides one.
    fn hessian(&self, _x: &Vector) -> Option<SymMat> {
        None
    }

    fn has_hessian(&self) -> bool {
        false
    }

    /// Unbiased sampled gradient over `batch` data points, for finite-sum
    /// objectives.
    fn sampled_gradient(&self, _x: &Vector, _batch: usize, _rng: &mut dyn RngCore) -> Option<Vector> {
        None
    }
}

/// A named objective with its standard start point and, when known, its
/// optimal value and a minimizer.
#[derive(Clone)]
pub struct Problem {
    name: String,
    x0: Vector,
    phi_star: Option<f64>,
    x_star: Option<Vector>,
    objective: Arc<dyn Objective>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("phi_star", &self.phi_star)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        x0: Vector,
        objective: Arc<dyn Objective>,
    ) -> Result<Self, ProblemError> {
        if x0.len() != objective.dim() || x0.is_empty() {
            return Err(ProblemError::Input(format!(
                "start point has dimension {}, objective {}",
                x0.len(),
                objective.dim()
            )));
        }
        Ok(Self {
            name: name.into(),
            x0,
            phi_star: None,
            x_star: None,
            objective,
        })
    }

    pub fn with_optimum(mut self, phi_star: f64, x_star: Option<Vector>) -> Self {
        self.phi_star = Some(phi_star);
        self.x_star = x_star;
        self
    }

    pub fn with_start(mut self, x0: Vector) -> Self {
        assert_eq!(x0.len(), self.dim(), "start point dimension");
        self.x0 = x0;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn phi_star(&self) -> Option<f64> {
        self.phi_star
    }

    pub fn x_star(&self) -> Option<&Vector> {
        self.x_star.as_ref()
    }

    pub fn phi(&self, x: &Vector) -> f64 {
        self.objective.value(x)
    }

    pub fn grad(&self, x: &Vector) -> Vector {
        self.objective.gradient(x)
    }

    pub fn hess(&self, x: &Vector) -> Option<SymMat> {
        self.objective.hessian(x)
    }

    pub fn has_hessian(&self) -> bool {
        self.objective.has_hessian()
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }
}

/// Names accepted by [`by_name`]: the CUTEst subset plus `TOY2D`.
pub fn registry_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = CUTEST_SUBSET.iter().map(|(n, _)| *n).collect();
    names.push("TOY2D");
    names
}

/// Looks up a fixed problem by name (case-insensitive) at its default
/// dimension.
pub fn by_name(name: &str) -> Result<Problem, ProblemError> {
    let upper = name.to_ascii_uppercase();
    if upper == "TOY2D" {
        return Ok(toy_2d());
    }
    let dim = CUTEST_SUBSET
        .iter()
        .find(|(n, _)| *n == upper)
        .map(|(_, d)| *d)
        .ok_or_else(|| ProblemError::Unsupported(name.to_string()))?;
    cutest_like(&upper, dim)
}
