//! CSV and plot-data emission.
//!
//! Files written for an experiment `<kind>` into the output directory:
//!
//! * `<kind>_trace.csv` (one per problem for cutest: `cutest_<PROBLEM>_trace.csv`),
//!   long format `method,trial,index_kind,index,metric_name,value`;
//! * `<kind>_summary.csv`, `problem,method,min,max,mean,median,variance` of
//!   each trial's final metric;
//! * `<kind>_<problem>_<method>_plot.csv`, either
//!   `index,mean,lo3sd,hi3sd,lo3sd_trial,hi3sd_trial` (iteration-indexed
//!   experiments) or `index,median,q1,q3,min,max` (evaluation-indexed).
//!
//! Reals use scientific notation with 7 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use softqn::solver::TrialRecord;

use crate::config::ExperimentKind;
use crate::error::BenchError;
use crate::experiment::{eval_grid, ExperimentResult, TrialGroup};
use crate::metrics::{align_trace, metric_log10_grad, metric_normalized_subopt};
use crate::stats::{quantile_sorted, summarize};

pub const TRACE_HEADER: [&str; 6] = ["method", "trial", "index_kind", "index", "metric_name", "value"];
pub const SUMMARY_HEADER: [&str; 7] = ["problem", "method", "min", "max", "mean", "median", "variance"];
pub const BAND_HEADER: [&str; 6] = ["index", "mean", "lo3sd", "hi3sd", "lo3sd_trial", "hi3sd_trial"];
pub const QUARTILE_HEADER: [&str; 6] = ["index", "median", "q1", "q3", "min", "max"];

pub fn fmt_real(v: f64) -> String {
    format!("{v:.6e}")
}

/// Iteration-indexed metric of one trial and its name.
fn iteration_metric(
    kind: ExperimentKind,
    rec: &TrialRecord,
    reference: (f64, Option<f64>),
) -> Result<(&'static str, Vec<f64>), BenchError> {
    Ok(match (kind, reference.1) {
        (ExperimentKind::Qp, Some(phi_star)) => (
            "log10_normalized_subopt",
            metric_normalized_subopt(rec, reference.0, phi_star)?,
        ),
        _ => ("log10_grad_norm", metric_log10_grad(rec)),
    })
}

/// Final per-trial value that goes into the summary table: `Δ` at the end
/// of the evaluation budget for cutest, the last iteration metric otherwise.
pub fn final_metric(result: &ExperimentResult, group: &TrialGroup, method: usize, trial: usize) -> Result<f64, BenchError> {
    let rec = &group.records[method][trial];
    match eval_grid(&result.config) {
        Some(grid) => Ok(*align_trace(rec, grid).values.last().expect("non-empty grid")),
        None => {
            let (_, m) = iteration_metric(result.config.kind, rec, group.reference[trial])?;
            Ok(*m.last().expect("non-empty trace"))
        }
    }
}

struct Csv {
    path: PathBuf,
    inner: csv::Writer<fs::File>,
}

impl Csv {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self, BenchError> {
        let inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|source| BenchError::Csv { path: path.clone(), source })?;
        let mut w = Csv { path, inner };
        w.row(header)?;
        Ok(w)
    }

    fn row<I, T>(&mut self, fields: I) -> Result<(), BenchError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|source| BenchError::Csv {
            path: self.path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<PathBuf, BenchError> {
        self.inner.flush().map_err(|source| BenchError::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.path)
    }
}

fn write_trace(result: &ExperimentResult, group: &TrialGroup, path: PathBuf) -> Result<PathBuf, BenchError> {
    let cfg = &result.config;
    let mut w = Csv::create(path, &TRACE_HEADER)?;
    for (mi, method) in cfg.methods.iter().enumerate() {
        for (t, rec) in group.records[mi].iter().enumerate() {
            let trial = t.to_string();
            if eval_grid(cfg).is_some() {
                for (j, v) in &rec.eval_trace {
                    w.row([method.name.as_str(), &trial, "fun_eval", &j.to_string(), "delta", &fmt_real(*v)])?;
                }
                continue;
            }
            let (name, values) = iteration_metric(cfg.kind, rec, group.reference[t])?;
            for (k, v) in values.iter().enumerate() {
                w.row([method.name.as_str(), &trial, "iteration", &k.to_string(), name, &fmt_real(*v)])?;
            }
            for (k, x) in rec.iterates.iter().enumerate() {
                for (i, xi) in x.iter().enumerate() {
                    let metric = format!("x{}", i + 1);
                    w.row([method.name.as_str(), &trial, "iteration", &k.to_string(), &metric, &fmt_real(*xi)])?;
                }
            }
        }
    }
    w.finish()
}

fn write_plot(result: &ExperimentResult, group: &TrialGroup, method: usize, path: PathBuf) -> Result<PathBuf, BenchError> {
    let cfg = &result.config;
    let records = &group.records[method];
    if let Some(grid) = eval_grid(cfg) {
        let aligned: Vec<Vec<f64>> = records.iter().map(|r| align_trace(r, grid).values).collect();
        let mut w = Csv::create(path, &QUARTILE_HEADER)?;
        for j in 0..grid {
            let mut col: Vec<f64> = aligned.iter().map(|a| a[j]).collect();
            col.sort_by(f64::total_cmp);
            let q = |p| fmt_real(quantile_sorted(&col, p));
            w.row([(j + 1).to_string(), q(0.5), q(0.25), q(0.75), q(0.0), q(1.0)])?;
        }
        return w.finish();
    }
    let traces: Vec<Vec<f64>> = records
        .iter()
        .zip(&group.reference)
        .map(|(r, &reference)| iteration_metric(cfg.kind, r, reference).map(|m| m.1))
        .collect::<Result<_, _>>()?;
    let len = traces.iter().map(Vec::len).min().unwrap_or(0);
    let trials = traces.len() as f64;
    let mut w = Csv::create(path, &BAND_HEADER)?;
    for k in 0..len {
        let col: Vec<f64> = traces.iter().map(|t| t[k]).collect();
        let s = summarize(&col)?;
        let sd = s.variance.sqrt();
        let se = sd / trials.sqrt();
        w.row([
            k.to_string(),
            fmt_real(s.mean),
            fmt_real(s.mean - 3.0 * se),
            fmt_real(s.mean + 3.0 * se),
            fmt_real(s.mean - 3.0 * sd),
            fmt_real(s.mean + 3.0 * sd),
        ])?;
    }
    w.finish()
}

fn write_summary(result: &ExperimentResult, path: PathBuf) -> Result<PathBuf, BenchError> {
    let mut w = Csv::create(path, &SUMMARY_HEADER)?;
    for group in &result.groups {
        for (mi, method) in result.config.methods.iter().enumerate() {
            let finals: Vec<f64> = (0..group.records[mi].len())
                .map(|t| final_metric(result, group, mi, t))
                .collect::<Result<_, _>>()?;
            let s = summarize(&finals)?;
            w.row([
                group.problem.clone(),
                method.name.clone(),
                fmt_real(s.min),
                fmt_real(s.max),
                fmt_real(s.mean),
                fmt_real(s.median),
                fmt_real(s.variance),
            ])?;
        }
    }
    w.finish()
}

/// Writes every file for `result` into `dir` (created if missing) and
/// returns the paths in write order.
pub fn emit_csv(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let kind = result.config.kind.name();
    let mut written = Vec::new();
    for group in &result.groups {
        let trace_name = match result.config.kind {
            ExperimentKind::Cutest => format!("{kind}_{}_trace.csv", group.problem),
            _ => format!("{kind}_trace.csv"),
        };
        written.push(write_trace(result, group, dir.join(trace_name))?);
        for (mi, method) in result.config.methods.iter().enumerate() {
            let name = format!("{kind}_{}_{}_plot.csv", group.problem, method.name);
            written.push(write_plot(result, group, mi, dir.join(name))?);
        }
    }
    written.push(write_summary(result, dir.join(format!("{kind}_summary.csv")))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format_keeps_seven_digits() {
        assert_eq!(fmt_real(2.28e-7), "2.280000e-7");
        assert_eq!(fmt_real(-1.0 / 3.0), "-3.333333e-1");
        assert_eq!(fmt_real(0.0), "0.000000e0");
    }
}
