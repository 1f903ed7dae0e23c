//! Analytic re-implementations of a subset of the CUTEst unconstrained
//! problems, with their standard start points and optimal values.

use std::sync::Arc;

use super::{Objective, Problem};
use crate::error::ProblemError;
use crate::linalg::Vector;

/// Implemented problems and their benchmark dimensions.
pub const CUTEST_SUBSET: &[(&str, usize)] = &[
    ("ARWHEAD", 100),
    ("NONDIA", 100),
    ("TRIDIA", 100),
    ("WOODS", 100),
    ("QUARTC", 100),
    ("SPARSQUR", 100),
    ("TQUARTIC", 100),
    ("MOREBV", 100),
    ("NONDQUAR", 100),
    ("GENROSE", 100),
    ("DIXMAANA", 90),
    ("DIXMAANE", 90),
    ("DIXMAANI", 90),
    ("DIXMAANM", 90),
];

/// Builds `name` at dimension `n`.
pub fn cutest_like(name: &str, n: usize) -> Result<Problem, ProblemError> {
    let upper = name.to_ascii_uppercase();
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(ProblemError::Input(format!("{upper}: {what}, got n = {n}")))
        }
    };
    let ones = Vector::from_element(n, 1.0);
    let zeros = Vector::zeros(n);
    let problem = match upper.as_str() {
        "ARWHEAD" => {
            need(n >= 2, "needs n >= 2")?;
            let mut xs = ones.clone();
            xs[n - 1] = 0.0;
            build(&upper, ones, Arwhead { n }, 0.0, Some(xs))?
        }
        "NONDIA" => {
            need(n >= 2, "needs n >= 2")?;
            build(&upper, Vector::from_element(n, -1.0), Nondia { n }, 0.0, Some(ones))?
        }
        "TRIDIA" => {
            need(n >= 2, "needs n >= 2")?;
            let xs = Vector::from_fn(n, |i, _| 0.5f64.powi(i as i32));
            build(&upper, ones, Tridia { n }, 0.0, Some(xs))?
        }
        "WOODS" => {
            need(n >= 4 && n.is_multiple_of(4), "needs a positive multiple of 4")?;
            let x0 = Vector::from_fn(n, |i, _| if i % 2 == 0 { -3.0 } else { -1.0 });
            build(&upper, x0, Woods { n }, 0.0, Some(ones))?
        }
        "QUARTC" => {
            need(n >= 1, "needs n >= 1")?;
            let xs = Vector::from_fn(n, |i, _| (i + 1) as f64);
            build(&upper, Vector::from_element(n, 2.0), Quartc { n }, 0.0, Some(xs))?
        }
        "SPARSQUR" => {
            need(n >= 1, "needs n >= 1")?;
            build(&upper, Vector::from_element(n, 0.5), Sparsqur::new(n), 0.0, Some(zeros))?
        }
        "TQUARTIC" => {
            need(n >= 2, "needs n >= 2")?;
            build(&upper, Vector::from_element(n, 0.1), Tquartic { n }, 0.0, Some(ones))?
        }
        "MOREBV" => {
            need(n >= 2, "needs n >= 2")?;
            let obj = Morebv { n };
            let x0 = Vector::from_fn(n, |i, _| {
                let t = obj.t(i);
                t * (t - 1.0)
            });
            let xs = obj.solve_residuals(&x0);
            build(&upper, x0, obj, 0.0, xs)?
        }
        "NONDQUAR" => {
            need(n >= 3, "needs n >= 3")?;
            let x0 = Vector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
            build(&upper, x0, Nondquar { n }, 0.0, Some(zeros))?
        }
        "GENROSE" => {
            need(n >= 2, "needs n >= 2")?;
            let x0 = Vector::from_fn(n, |i, _| (i + 1) as f64 / (n + 1) as f64);
            build(&upper, x0, Genrose { n }, 1.0, Some(ones))?
        }
        "DIXMAANA" | "DIXMAANE" | "DIXMAANI" | "DIXMAANM" => {
            need(n >= 3 && n.is_multiple_of(3), "needs a positive multiple of 3")?;
            let params = match upper.as_str() {
                "DIXMAANA" => DixmaanParams::new(0.0, [0, 0, 0, 0]),
                "DIXMAANE" => DixmaanParams::new(0.0, [1, 0, 0, 1]),
                "DIXMAANI" => DixmaanParams::new(0.0, [2, 0, 0, 2]),
                _ => DixmaanParams::new(0.0, [2, 1, 1, 2]),
            };
            build(&upper, Vector::from_element(n, 2.0), Dixmaan { n, params }, 1.0, Some(zeros))?
        }
        _ => return Err(ProblemError::Unsupported(name.to_string())),
    };
    Ok(problem)
}

fn build(
    name: &str,
    x0: Vector,
    obj: impl Objective + 'static,
    phi_star: f64,
    x_star: Option<Vector>,
) -> Result<Problem, ProblemError> {
    Ok(Problem::new(name, x0, Arc::new(obj))?.with_optimum(phi_star, x_star))
}

/// `Σᵢ₍ᵢ<ₙ₎ (xᵢ² + xₙ²)² − 4xᵢ + 3`.
struct Arwhead {
    n: usize,
}

impl Objective for Arwhead {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        let xn2 = x[self.n - 1].powi(2);
        (0..self.n - 1)
            .map(|i| (x[i] * x[i] + xn2).powi(2) - 4.0 * x[i] + 3.0)
            .sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let last = self.n - 1;
        let xn = x[last];
        let mut g = Vector::zeros(self.n);
        for i in 0..last {
            let t = x[i] * x[i] + xn * xn;
            g[i] = 4.0 * t * x[i] - 4.0;
            g[last] += 4.0 * t * xn;
        }
        g
    }
}

/// `(x₁ − 1)² + Σᵢ₌₂ⁿ 100(x₁ − xᵢ₋₁²)²`.
struct Nondia {
    n: usize,
}

impl Objective for Nondia {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        (x[0] - 1.0).powi(2)
            + (1..self.n)
                .map(|k| 100.0 * (x[0] - x[k - 1] * x[k - 1]).powi(2))
                .sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        g[0] = 2.0 * (x[0] - 1.0);
        for k in 1..self.n {
            let r = x[0] - x[k - 1] * x[k - 1];
            g[0] += 200.0 * r;
            g[k - 1] -= 400.0 * r * x[k - 1];
        }
        g
    }
}

/// `(x₁ − 1)² + Σᵢ₌₂ⁿ i(2xᵢ − xᵢ₋₁)²`.
struct Tridia {
    n: usize,
}

impl Objective for Tridia {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        (x[0] - 1.0).powi(2)
            + (1..self.n)
                .map(|k| (k + 1) as f64 * (2.0 * x[k] - x[k - 1]).powi(2))
                .sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        g[0] = 2.0 * (x[0] - 1.0);
        for k in 1..self.n {
            let w = (k + 1) as f64;
            let r = 2.0 * x[k] - x[k - 1];
            g[k] += 4.0 * w * r;
            g[k - 1] -= 2.0 * w * r;
        }
        g
    }
}

/// Block sum of the four-variable Wood function.
struct Woods {
    n: usize,
}

impl Objective for Woods {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        (0..self.n / 4)
            .map(|b| {
                let (x1, x2, x3, x4) = (x[4 * b], x[4 * b + 1], x[4 * b + 2], x[4 * b + 3]);
                100.0 * (x2 - x1 * x1).powi(2)
                    + (1.0 - x1).powi(2)
                    + 90.0 * (x4 - x3 * x3).powi(2)
                    + (1.0 - x3).powi(2)
                    + 10.1 * ((x2 - 1.0).powi(2) + (x4 - 1.0).powi(2))
                    + 19.8 * (x2 - 1.0) * (x4 - 1.0)
            })
            .sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        for b in 0..self.n / 4 {
            let i = 4 * b;
            let (x1, x2, x3, x4) = (x[i], x[i + 1], x[i + 2], x[i + 3]);
            g[i] = -400.0 * x1 * (x2 - x1 * x1) - 2.0 * (1.0 - x1);
            g[i + 1] = 200.0 * (x2 - x1 * x1) + 20.2 * (x2 - 1.0) + 19.8 * (x4 - 1.0);
            g[i + 2] = -360.0 * x3 * (x4 - x3 * x3) - 2.0 * (1.0 - x3);
            g[i + 3] = 180.0 * (x4 - x3 * x3) + 20.2 * (x4 - 1.0) + 19.8 * (x2 - 1.0);
        }
        g
    }
}

/// `Σ (xᵢ − i)⁴`.
struct Quartc {
    n: usize,
}

impl Objective for Quartc {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - (i + 1) as f64).powi(4))
            .sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.n, |i, _| 4.0 * (x[i] - (i + 1) as f64).powi(3))
    }
}

/// `Σᵢ ½ i (Σ_{j∈Jᵢ} xⱼ²)²` with
/// `Jᵢ = {i} ∪ {mod(k·i − 1, n) + 1 : k ∈ {2, 3, 5, 7, 11}}`.
struct Sparsqur {
    n: usize,
    groups: Vec<[usize; 6]>,
}

impl Sparsqur {
    fn new(n: usize) -> Self {
        let groups = (1..=n)
            .map(|i| {
                let j = |k: usize| (k * i - 1) % n;
                [i - 1, j(2), j(3), j(5), j(7), j(11)]
            })
            .collect();
        Self { n, groups }
    }
}

impl Objective for Sparsqur {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(i, grp)| {
                let t: f64 = grp.iter().map(|&j| x[j] * x[j]).sum();
                0.5 * (i + 1) as f64 * t * t
            })
            .sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        for (i, grp) in self.groups.iter().enumerate() {
            let t: f64 = grp.iter().map(|&j| x[j] * x[j]).sum();
            let c = (i + 1) as f64 * t;
            for &j in grp {
                g[j] += 2.0 * c * x[j];
            }
        }
        g
    }
}

/// `(x₁ − 1)² + Σᵢ₌₂ⁿ (x₁² − xᵢ²)²`.
struct Tquartic {
    n: usize,
}

impl Objective for Tquartic {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        let x1s = x[0] * x[0];
        (x[0] - 1.0).powi(2) + (1..self.n).map(|i| (x1s - x[i] * x[i]).powi(2)).sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let x1s = x[0] * x[0];
        let mut g = Vector::zeros(self.n);
        g[0] = 2.0 * (x[0] - 1.0);
        for i in 1..self.n {
            let r = x1s - x[i] * x[i];
            g[0] += 4.0 * r * x[0];
            g[i] = -4.0 * r * x[i];
        }
        g
    }
}

/// Discrete boundary value problem: `Σ rᵢ²` with
/// `rᵢ = 2xᵢ − xᵢ₋₁ − xᵢ₊₁ + ½h²(xᵢ + tᵢ + 1)³`, `x₀ = xₙ₊₁ = 0`.
struct Morebv {
    n: usize,
}

impl Morebv {
    fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    fn t(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    fn residuals(&self, x: &Vector) -> Vector {
        let h2 = self.h() * self.h();
        Vector::from_fn(self.n, |i, _| {
            let left = if i > 0 { x[i - 1] } else { 0.0 };
            let right = if i + 1 < self.n { x[i + 1] } else { 0.0 };
            2.0 * x[i] - left - right + 0.5 * h2 * (x[i] + self.t(i) + 1.0).powi(3)
        })
    }

    /// Newton's method on the tridiagonal residual system; the root is the
    /// zero-residual minimizer.
    fn solve_residuals(&self, x0: &Vector) -> Option<Vector> {
        let n = self.n;
        let h2 = self.h() * self.h();
        let mut x = x0.clone();
        for _ in 0..50 {
            let r = self.residuals(&x);
            if r.norm() < 1e-15 {
                break;
            }
            let jac = nalgebra::DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    2.0 + 1.5 * h2 * (x[i] + self.t(i) + 1.0).powi(2)
                } else if i.abs_diff(j) == 1 {
                    -1.0
                } else {
                    0.0
                }
            });
            let step = jac.lu().solve(&r)?;
            x -= step;
        }
        (self.residuals(&x).norm() < 1e-12).then_some(x)
    }
}

impl Objective for Morebv {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        self.residuals(x).norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let r = self.residuals(x);
        let h2 = self.h() * self.h();
        Vector::from_fn(self.n, |i, _| {
            let diag = 2.0 + 1.5 * h2 * (x[i] + self.t(i) + 1.0).powi(2);
            let mut gi = diag * r[i];
            if i > 0 {
                gi -= r[i - 1];
            }
            if i + 1 < self.n {
                gi -= r[i + 1];
            }
            2.0 * gi
        })
    }
}

/// `(x₁ − x₂)² + Σᵢ₌₁ⁿ⁻² (xᵢ + xᵢ₊₁ + xₙ)⁴ + (xₙ₋₁ + xₙ)²`.
struct Nondquar {
    n: usize,
}

impl Objective for Nondquar {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        let n = self.n;
        (x[0] - x[1]).powi(2)
            + (0..n - 2)
                .map(|i| (x[i] + x[i + 1] + x[n - 1]).powi(4))
                .sum::<f64>()
            + (x[n - 2] + x[n - 1]).powi(2)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let n = self.n;
        let mut g = Vector::zeros(n);
        let d = 2.0 * (x[0] - x[1]);
        g[0] += d;
        g[1] -= d;
        for i in 0..n - 2 {
            let c = 4.0 * (x[i] + x[i + 1] + x[n - 1]).powi(3);
            g[i] += c;
            g[i + 1] += c;
            g[n - 1] += c;
        }
        let e = 2.0 * (x[n - 2] + x[n - 1]);
        g[n - 2] += e;
        g[n - 1] += e;
        g
    }
}

/// `1 + Σᵢ₌₂ⁿ 100(xᵢ − xᵢ₋₁²)² + (xᵢ − 1)²`.
struct Genrose {
    n: usize,
}

impl Objective for Genrose {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        1.0 + (1..self.n)
            .map(|i| 100.0 * (x[i] - x[i - 1] * x[i - 1]).powi(2) + (x[i] - 1.0).powi(2))
            .sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.n);
        for i in 1..self.n {
            let r = x[i] - x[i - 1] * x[i - 1];
            g[i] += 200.0 * r + 2.0 * (x[i] - 1.0);
            g[i - 1] -= 400.0 * r * x[i - 1];
        }
        g
    }
}

#[derive(Debug, Clone, Copy)]
struct DixmaanParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    k: [i32; 4],
}

impl DixmaanParams {
    fn new(beta: f64, k: [i32; 4]) -> Self {
        Self {
            alpha: 1.0,
            beta,
            gamma: 0.125,
            delta: 0.125,
            k,
        }
    }
}

/// Dixon–Maany family with `n = 3m`:
/// `1 + Σ α xᵢ²(i/n)^k₁ + Σ β xᵢ²(xᵢ₊₁ + xᵢ₊₁²)²(i/n)^k₂
///    + Σᵢ₌₁²ᵐ γ xᵢ²xᵢ₊ₘ⁴(i/n)^k₃ + Σᵢ₌₁ᵐ δ xᵢxᵢ₊₂ₘ(i/n)^k₄`.
struct Dixmaan {
    n: usize,
    params: DixmaanParams,
}

impl Dixmaan {
    fn w(&self, i: usize, k: i32) -> f64 {
        ((i + 1) as f64 / self.n as f64).powi(k)
    }
}

impl Objective for Dixmaan {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> f64 {
        let DixmaanParams {
            alpha,
            beta,
            gamma,
            delta,
            k,
        } = self.params;
        let n = self.n;
        let m = n / 3;
        let mut f = 1.0;
        for i in 0..n {
            f += alpha * x[i] * x[i] * self.w(i, k[0]);
        }
        if beta != 0.0 {
            for i in 0..n - 1 {
                let u = x[i + 1] + x[i + 1] * x[i + 1];
                f += beta * x[i] * x[i] * u * u * self.w(i, k[1]);
            }
        }
        for i in 0..2 * m {
            f += gamma * x[i] * x[i] * x[i + m].powi(4) * self.w(i, k[2]);
        }
        for i in 0..m {
            f += delta * x[i] * x[i + 2 * m] * self.w(i, k[3]);
        }
        f
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let DixmaanParams {
            alpha,
            beta,
            gamma,
            delta,
            k,
        } = self.params;
        let n = self.n;
        let m = n / 3;
        let mut g = Vector::zeros(n);
        for i in 0..n {
            g[i] += 2.0 * alpha * x[i] * self.w(i, k[0]);
        }
        if beta != 0.0 {
            for i in 0..n - 1 {
                let w = beta * self.w(i, k[1]);
                let u = x[i + 1] + x[i + 1] * x[i + 1];
                g[i] += 2.0 * w * x[i] * u * u;
                g[i + 1] += 2.0 * w * x[i] * x[i] * u * (1.0 + 2.0 * x[i + 1]);
            }
        }
        for i in 0..2 * m {
            let w = gamma * self.w(i, k[2]);
            g[i] += 2.0 * w * x[i] * x[i + m].powi(4);
            g[i + m] += 4.0 * w * x[i] * x[i] * x[i + m].powi(3);
        }
        for i in 0..m {
            let w = delta * self.w(i, k[3]);
            g[i] += w * x[i + 2 * m];
            g[i + 2 * m] += w * x[i];
        }
        g
    }
}
