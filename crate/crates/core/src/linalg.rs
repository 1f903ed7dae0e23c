//! Dense vector and symmetric-matrix types shared by every update formula.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::QnError;

/// Problem-space vector (iterates, gradients, steps).
pub type Vector = DVector<f64>;

/// Dense symmetric matrix.
///
/// Every constructor and every update in this crate re-symmetrizes with
/// `(A + Aᵀ)/2`, so the stored entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat(DMatrix<f64>);

impl SymMat {
    /// Wraps `m`, replacing it by its symmetric part.
    pub fn new(m: DMatrix<f64>) -> Result<Self, QnError> {
        if !m.is_square() {
            return Err(QnError::InvalidArgument(format!(
                "matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        Self((m + t) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self, QnError> {
        if data.len() != n * n {
            return Err(QnError::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `tr(A²)`, which for symmetric `A` is the squared Frobenius norm.
    pub fn trace_of_square(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    pub fn quad_form(&self, v: &Vector) -> f64 {
        v.dot(&(&self.0 * v))
    }

    pub fn cholesky(&self) -> Option<Cholesky<f64, nalgebra::Dyn>> {
        Cholesky::new(self.0.clone())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.is_finite() && self.cholesky().is_some()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn add_scaled_identity(&self, lambda: f64) -> SymMat {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += lambda;
        }
        SymMat(m)
    }
}

/// A curvature pair: step `s = x⁺ − x` and gradient difference `y = g⁺ − g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePair {
    s: Vector,
    y: Vector,
}

impl CurvaturePair {
    pub fn new(s: Vector, y: Vector) -> Result<Self, QnError> {
        if s.len() != y.len() {
            return Err(QnError::Dimension {
                expected: s.len(),
                got: y.len(),
            });
        }
        if s.is_empty() {
            return Err(QnError::InvalidArgument("empty curvature pair".into()));
        }
        if !s.iter().all(|v| v.is_finite()) {
            return Err(QnError::NonFinite("s"));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(QnError::NonFinite("y"));
        }
        Ok(Self { s, y })
    }

    pub fn from_slices(s: &[f64], y: &[f64]) -> Result<Self, QnError> {
        Self::new(Vector::from_column_slice(s), Vector::from_column_slice(y))
    }

    pub fn s(&self) -> &Vector {
        &self.s
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn sty(&self) -> f64 {
        self.s.dot(&self.y)
    }

    pub fn is_zero_step(&self) -> bool {
        self.s.iter().all(|&v| v == 0.0)
    }
}

/// Symmetric positive definite inverse-Hessian approximation `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseHessianApprox {
    h: SymMat,
}

impl InverseHessianApprox {
    /// Validates positive definiteness with a Cholesky factorization.
    pub fn new(h: SymMat) -> Result<Self, QnError> {
        if !h.is_finite() {
            return Err(QnError::NonFinite("H"));
        }
        if h.cholesky().is_none() {
            return Err(QnError::NotPositiveDefinite);
        }
        Ok(Self { h })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            h: SymMat::identity(n),
        }
    }

    /// Skips the Cholesky check; callers must already have established PD.
    pub(crate) fn from_checked(h: SymMat) -> Self {
        Self { h }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn matrix(&self) -> &SymMat {
        &self.h
    }

    pub fn into_matrix(self) -> SymMat {
        self.h
    }
}

/// Outer product `a bᵀ`.
pub fn outer(a: &Vector, b: &Vector) -> DMatrix<f64> {
    a * b.transpose()
}

/// Symmetric positive definite inverse via Cholesky.
pub fn spd_inverse(m: &SymMat) -> Result<SymMat, QnError> {
    let chol = m.cholesky().ok_or(QnError::NotPositiveDefinite)?;
    Ok(SymMat::symmetrized(chol.inverse()))
}
