use crate::config::{ConfigError, ExperimentConfig, Method};
use crate::run::{run_experiment_with, Execution, ExperimentReport};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub report: ExperimentReport,
    /// Log-log slope of e_inf against N per method; None when fewer than two
    /// finite errors are available.
    pub slopes: Vec<(Method, Option<f64>)>,
}

impl SweepResult {
    pub fn slope(&self, method: Method) -> Option<f64> {
        self.slopes.iter().find(|(m, _)| *m == method).and_then(|(_, s)| *s)
    }
}

/// Least-squares slope of log(e) against log(N).
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    let len = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / len;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / len;
    let num: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(num / den)
}

/// The leading run of strictly decreasing errors, so that a round-off plateau
/// does not flatten the fit. A method whose error never decreases is fitted
/// over all its points.
pub fn decreasing_segment(points: &[(usize, f64)]) -> &[(usize, f64)] {
    let mut end = 1;
    while end < points.len() && points[end].1 < points[end - 1].1 {
        end += 1;
    }
    if end >= 2 {
        &points[..end]
    } else {
        points
    }
}

pub fn convergence_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, ConfigError> {
    convergence_sweep_with(cfg, Execution::default())
}

pub fn convergence_sweep_with(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepResult, ConfigError> {
    if cfg.n_list.len() < 3 {
        return Err(ConfigError::SweepTooShort(cfg.n_list.len()));
    }
    let report = run_experiment_with(cfg, exec)?;
    let mut methods: Vec<Method> = report.rows.iter().map(|r| r.method).collect();
    methods.dedup();
    let slopes = methods
        .into_iter()
        .map(|m| {
            let pts: Vec<(usize, f64)> = report
                .rows
                .iter()
                .filter(|r| r.method == m && r.e_inf.is_finite() && r.e_inf > 0.0)
                .map(|r| (r.n, r.e_inf))
                .collect();
            (m, loglog_slope(decreasing_segment(&pts)))
        })
        .collect();
    Ok(SweepResult { report, slopes })
}
