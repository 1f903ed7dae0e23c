//! Summary statistics over trials.

use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Sample variance (`n − 1` denominator; 0 for a single value).
    pub variance: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Quantile `p` of sorted data by linear interpolation between order
/// statistics at position `p·(n − 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Statistics of `values`. NaN entries are rejected.
pub fn summarize(values: &[f64]) -> Result<SummaryStats, BenchError> {
    if values.is_empty() {
        return Err(BenchError::Input("summary of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(BenchError::Input("summary of a sample containing NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let variance = if sorted.len() > 1 {
        sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(SummaryStats {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        mean,
        median: quantile_sorted(&sorted, 0.5),
        variance,
        q1: quantile_sorted(&sorted, 0.25),
        q3: quantile_sorted(&sorted, 0.75),
    })
}
