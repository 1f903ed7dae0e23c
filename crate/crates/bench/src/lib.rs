//! Monte Carlo experiments for the `softqn` optimizers: configuration,
//! the trial runner, metrics, summary statistics and CSV output.
//!
//! ```no_run
//! use softqn_bench::config::{ExperimentConfig, ExperimentKind};
//! use softqn_bench::{emit_csv, monte_carlo};
//!
//! let mut cfg = ExperimentConfig::defaults(ExperimentKind::Qp);
//! cfg.trials = 4;
//! let result = monte_carlo(&cfg).unwrap();
//! emit_csv(&result, std::path::Path::new("results")).unwrap();
//! ```

pub mod checks;
pub mod config;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod output;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, MethodSpec};
pub use error::BenchError;
pub use experiment::{monte_carlo, monte_carlo_with, Execution, ExperimentResult, TrialGroup};
pub use metrics::{align_trace, metric_log10_grad, metric_normalized_subopt, AlignedTrace};
pub use output::emit_csv;
pub use stats::{summarize, SummaryStats};
