//! L2-regularized logistic regression on LIBSVM-format binary data.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use rand::RngCore;

use super::{Objective, Problem};
use crate::error::ProblemError;
use crate::linalg::{SymMat, Vector};

/// Dense binary-classification dataset, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticDataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    n_features: usize,
}

impl LogisticDataset {
    /// `features` is row-major with `labels.len()` rows. Labels must be ±1.
    pub fn new(features: Vec<f64>, labels: Vec<f64>, n_features: usize) -> Result<Self, ProblemError> {
        if labels.is_empty() {
            return Err(ProblemError::Input("dataset has no samples".into()));
        }
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(ProblemError::Input(format!(
                "feature matrix has {} entries, expected {}x{}",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1.0 && l != -1.0) {
            return Err(ProblemError::Input(format!("label {bad} is not +1/-1")));
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(ProblemError::Input("non-finite feature value".into()));
        }
        Ok(Self {
            features,
            labels,
            n_features,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.n_features];
        for i in 0..self.n_samples() {
            for (acc, v) in sq.iter_mut().zip(self.row(i)) {
                *acc += v * v;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Scales each feature column to unit 2-norm; all-zero columns stay zero.
    pub fn normalize_columns(&mut self) {
        let norms = self.column_norms();
        let n = self.n_features;
        for (k, v) in self.features.iter_mut().enumerate() {
            let nrm = norms[k % n];
            if nrm > 0.0 {
                *v /= nrm;
            }
        }
    }
}

/// Parses LIBSVM sparse text (`label idx:val idx:val ...`, 1-based indices).
///
/// Labels `> 0` map to `+1`, everything else (`0`, `-1`) to `-1`. The feature
/// count is the largest index seen, or `n_features` when given (indices
/// beyond it are an error). No normalization is applied.
pub fn parse_libsvm(
    reader: impl BufRead,
    source: &str,
    n_features: Option<usize>,
) -> Result<LogisticDataset, ProblemError> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    let parse_err = |line: usize, msg: String| ProblemError::Parse {
        path: source.to_string(),
        line,
        msg,
    };

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| ProblemError::Io {
            path: source.to_string(),
            source: e,
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label {label_tok:?}")))?;
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad value {val:?}")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value {val}")));
            }
            if let Some(n) = n_features {
                if idx > n {
                    return Err(parse_err(lineno, format!("index {idx} exceeds {n} features")));
                }
            }
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(if label > 0.0 { 1.0 } else { -1.0 });
        rows.push(row);
    }

    if labels.is_empty() {
        return Err(ProblemError::Input(format!("{source}: no samples")));
    }
    let n = n_features.unwrap_or(max_index);
    if n == 0 {
        return Err(ProblemError::Input(format!("{source}: no features")));
    }
    let mut features = vec![0.0; labels.len() * n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            features[i * n + j] = v;
        }
    }
    LogisticDataset::new(features, labels, n)
}

/// Loads a LIBSVM file and applies feature-wise 2-norm normalization.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<LogisticDataset, ProblemError> {
    load_libsvm_with_dim(path, None)
}

pub fn load_libsvm_with_dim(
    path: impl AsRef<Path>,
    n_features: Option<usize>,
) -> Result<LogisticDataset, ProblemError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| ProblemError::Io {
        path: display.clone(),
        source: e,
    })?;
    let mut data = parse_libsvm(BufReader::new(file), &display, n_features)?;
    data.normalize_columns();
    Ok(data)
}

/// `log(1 + eᵗ)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `φ(x) = (1/N) Σ log(1 + exp(−yᵢ(x₀ + x₁:ₙᵀzᵢ))) + ρ‖x₁:ₙ‖²`; the
/// intercept `x₀` is not regularized.
#[derive(Debug, Clone)]
pub struct Logistic {
    data: Arc<LogisticDataset>,
    rho: f64,
}

impl Logistic {
    fn margin(&self, x: &Vector, i: usize) -> f64 {
        let z = self.data.row(i);
        x[0] + z.iter().zip(x.iter().skip(1)).map(|(a, b)| a * b).sum::<f64>()
    }

    fn regularizer(&self, x: &Vector) -> f64 {
        self.rho * x.iter().skip(1).map(|v| v * v).sum::<f64>()
    }

    /// Mean per-sample loss gradient over `indices` plus the regularizer
    /// gradient. Full and minibatch gradients share this path, so a batch
    /// covering every index in order reproduces the full gradient exactly.
    fn batch_gradient(&self, x: &Vector, indices: impl ExactSizeIterator<Item = usize>) -> Vector {
        let count = indices.len() as f64;
        let mut g = Vector::zeros(x.len());
        for i in indices {
            let y = self.data.label(i);
            let coef = -y * sigmoid(-y * self.margin(x, i));
            g[0] += coef;
            for (gj, zj) in g.iter_mut().skip(1).zip(self.data.row(i)) {
                *gj += coef * zj;
            }
        }
        g /= count;
        for j in 1..x.len() {
            g[j] += 2.0 * self.rho * x[j];
        }
        g
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.data.n_features() + 1
    }

    fn value(&self, x: &Vector) -> f64 {
        let n = self.data.n_samples();
        let loss: f64 = (0..n)
            .map(|i| softplus(-self.data.label(i) * self.margin(x, i)))
            .sum();
        loss / n as f64 + self.regularizer(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.batch_gradient(x, 0..self.data.n_samples())
    }

    fn hessian(&self, x: &Vector) -> Option<SymMat> {
        let d = self.dim();
        let n = self.data.n_samples();
        let mut h = nalgebra::DMatrix::zeros(d, d);
        let mut aug = vec![0.0; d];
        for i in 0..n {
            let s = sigmoid(self.margin(x, i));
            let w = s * (1.0 - s);
            aug[0] = 1.0;
            aug[1..].copy_from_slice(self.data.row(i));
            for c in 0..d {
                for r in 0..d {
                    h[(r, c)] += w * aug[r] * aug[c];
                }
            }
        }
        h /= n as f64;
        for j in 1..d {
            h[(j, j)] += 2.0 * self.rho;
        }
        Some(SymMat::new(h).expect("square"))
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn sampled_gradient(&self, x: &Vector, batch: usize, rng: &mut dyn RngCore) -> Option<Vector> {
        let n = self.data.n_samples();
        let batch = batch.clamp(1, n);
        let mut idx = rand::seq::index::sample(rng, n, batch).into_vec();
        idx.sort_unstable();
        Some(self.batch_gradient(x, idx.into_iter()))
    }
}

/// Logistic regression problem of dimension `n + 1` (intercept first),
/// started at `𝟎`. `φ*` is unknown.
pub fn logistic_problem(data: Arc<LogisticDataset>, rho: f64) -> Result<Problem, ProblemError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(ProblemError::Input(format!("rho must be positive, got {rho}")));
    }
    let d = data.n_features() + 1;
    Problem::new("LOGREG", Vector::zeros(d), Arc::new(Logistic { data, rho }))
}

/// Minibatch gradient: `batch` indices sampled uniformly without
/// replacement, mean per-sample gradient plus regularizer gradient.
pub fn minibatch_gradient(
    data: &Arc<LogisticDataset>,
    rho: f64,
    x: &Vector,
    batch: usize,
    rng: &mut dyn RngCore,
) -> Result<Vector, ProblemError> {
    if batch == 0 || batch > data.n_samples() {
        return Err(ProblemError::Input(format!(
            "batch {batch} outside 1..={}",
            data.n_samples()
        )));
    }
    let obj = Logistic {
        data: Arc::clone(data),
        rho,
    };
    Ok(obj.sampled_gradient(x, batch, rng).expect("finite-sum objective"))
}
