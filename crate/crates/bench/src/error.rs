use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("config {path}:{line}: {msg}")]
    ConfigSyntax { path: String, line: usize, msg: String },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Problem(#[from] softqn::ProblemError),
    #[error(transparent)]
    Solver(#[from] softqn::SolverError),
    #[error("{0}")]
    Input(String),
}

impl BenchError {
    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// dataset errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::ConfigSyntax { .. } => 2,
            BenchError::Dataset(_) => 3,
            _ => 1,
        }
    }
}
