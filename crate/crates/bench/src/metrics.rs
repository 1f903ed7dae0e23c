//! Per-trial metric traces.

use softqn::solver::TrialRecord;

use crate::error::BenchError;

/// Floor applied to every log₁₀ metric; zero or negative arguments map here.
pub const LOG_FLOOR: f64 = -16.0;

fn clamped_log10(v: f64) -> f64 {
    if v > 0.0 {
        v.log10().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

/// `log₁₀ ‖∇φ(x_k)‖` per iteration.
pub fn metric_log10_grad(record: &TrialRecord) -> Vec<f64> {
    record.true_grad_norm.iter().map(|&g| clamped_log10(g)).collect()
}

/// `log₁₀((φ(x_k) − φ*)/(φ(x₀) − φ*))` per iteration. The record's
/// suboptimality trace must be measured against the same `φ*`.
pub fn metric_normalized_subopt(record: &TrialRecord, phi0: f64, phi_star: f64) -> Result<Vec<f64>, BenchError> {
    let gap0 = phi0 - phi_star;
    if !(gap0 > 0.0 && gap0.is_finite()) {
        return Err(BenchError::Input(format!("phi0 {phi0} must exceed phi_star {phi_star}")));
    }
    Ok(record
        .true_suboptimality
        .iter()
        .map(|&d| clamped_log10(d / gap0))
        .collect())
}

/// Suboptimality resampled on function-evaluation counts `j = 1..=grid_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTrace {
    pub grid: Vec<usize>,
    pub values: Vec<f64>,
}

/// Value at `j` is the suboptimality of the last iterate whose line search
/// finished within `j` evaluations.
pub fn align_trace(record: &TrialRecord, grid_max: usize) -> AlignedTrace {
    let trace = &record.eval_trace;
    let mut values = Vec::with_capacity(grid_max);
    let mut next = 0;
    let mut current = trace.first().map_or(f64::NAN, |e| e.1);
    for j in 1..=grid_max {
        while next < trace.len() && trace[next].0 <= j {
            current = trace[next].1;
            next += 1;
        }
        values.push(current);
    }
    AlignedTrace {
        grid: (1..=grid_max).collect(),
        values,
    }
}
