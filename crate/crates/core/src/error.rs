use thiserror::Error;

/// Errors raised by the quasi-Newton update formulas and their helpers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("curvature condition violated: s'y = {sty:e} <= {tol:e}")]
    Curvature { sty: f64, tol: f64 },
    #[error("SP-BFGS positive definiteness threshold violated: s'y = {sty:e} <= -1/beta = {threshold:e}")]
    PdThreshold { sty: f64, threshold: f64 },
    #[error("near-singular SP-BFGS coefficient denominator ({0:e})")]
    Singular(f64),
    #[error("internal consistency: {0}")]
    Internal(&'static str),
}

/// Errors raised by the brute-force penalty minimizer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Qn(#[from] QnError),
    #[error("oracle supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Errors raised while building problems, datasets and noisy oracles.
#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported problem {0:?}")]
    Unsupported(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("noise model {0} is not available on this channel")]
    Noise(&'static str),
}

/// Errors raised by the solver loop.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Qn(#[from] QnError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} requires an exact Hessian")]
    MissingHessian(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(String),
}
