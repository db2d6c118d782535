use std::f64::consts::PI;
use std::time::Instant;

use gfs::baselines::{eckhoff_derivative, fft_derivative, prony_derivative_signal, prony_fit, roache_derivative};
use gfs::functions::TestFunction;
use gfs::gfs::{gfs_decompose, gfs_derivative};
use gfs::grid::{lp_error_norm, make_grid, sample, SampledSignal};
use gfs::jumps::{estimate_jumps, fd_differentiate, jumps_from_analytic, JumpData};

use crate::config::{ConfigError, ExperimentConfig, JumpSpec, Method};

/// How rows are scheduled. `Parallel` degrades to sequential when the crate
/// is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub function: String,
    pub n: usize,
    /// n for GFS, q for Roache and Eckhoff, M for Prony, r for FD, 0 for FFT.
    pub param: usize,
    /// `analytic`, `fd:<r>`, or `none` for methods that take no jumps.
    pub jump_source: String,
    pub e_inf: f64,
    pub e_2: f64,
    pub wall_ms: f64,
    /// Why the method produced no usable derivative; errors are then +inf.
    pub failure: Option<String>,
}

impl ReportRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn find(&self, method: Method, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method && r.n == n)
    }

    fn sort(&mut self) {
        self.rows.sort_by_key(|a| (a.method, a.n));
    }
}

fn jumps_for(f: &TestFunction, u: &SampledSignal, spec: JumpSpec, q: usize) -> Result<JumpData, String> {
    match spec {
        JumpSpec::Analytic => Ok(jumps_from_analytic(f, q)),
        JumpSpec::Fd(r) => estimate_jumps(u, q, r).map_err(|e| e.to_string()),
    }
}

fn differentiate(cfg: &ExperimentConfig, f: &TestFunction, method: Method, u: &SampledSignal) -> Result<SampledSignal, String> {
    let order = cfg.derivative_order;
    if order != 1 && !matches!(method, Method::Gfs | Method::Fft) {
        return Err(format!("{method} computes first derivatives only"));
    }
    match method {
        Method::Gfs => {
            let jumps = jumps_for(f, u, cfg.jumps, 4 * cfg.n_modes)?;
            let dec = gfs_decompose(u, cfg.n_modes, &jumps).map_err(|e| e.to_string())?;
            gfs_derivative(&dec, order).map_err(|e| e.to_string())
        }
        Method::Fft => Ok(fft_derivative(u, order)),
        Method::Fd => fd_differentiate(u, cfg.fd_order).map_err(|e| e.to_string()),
        Method::Roache => Ok(roache_derivative(u, &jumps_for(f, u, cfg.jumps, cfg.q)?, cfg.q)),
        Method::Eckhoff => Ok(eckhoff_derivative(u, &jumps_for(f, u, cfg.jumps, cfg.q)?, cfg.q)),
        Method::Prony => {
            let fit = prony_fit(u, cfg.prony_m_for(f, u.grid.n)).map_err(|e| e.to_string())?;
            Ok(prony_derivative_signal(&fit, u))
        }
    }
}

fn param_for(cfg: &ExperimentConfig, f: &TestFunction, method: Method, n: usize) -> usize {
    match method {
        Method::Gfs => cfg.n_modes,
        Method::Fft => 0,
        Method::Fd => cfg.fd_order,
        Method::Roache | Method::Eckhoff => cfg.q,
        Method::Prony => cfg.prony_m_for(f, n),
    }
}

/// One (method, N) cell: sample, differentiate, compare with the analytic
/// derivative at all N + 1 nodes.
pub fn run_row(cfg: &ExperimentConfig, f: &TestFunction, method: Method, n: usize) -> ReportRow {
    let grid = make_grid(-PI, PI, n).expect("grid sizes are validated");
    let start = Instant::now();
    let result = sample(f, &grid).map_err(|e| e.to_string()).and_then(|u| differentiate(cfg, f, method, &u));
    let wall_ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let mut row = ReportRow {
        method,
        function: cfg.function.clone(),
        n,
        param: param_for(cfg, f, method, n),
        jump_source: if method.uses_jumps() { cfg.jumps.to_string() } else { "none".to_string() },
        e_inf: f64::INFINITY,
        e_2: f64::INFINITY,
        wall_ms,
        failure: None,
    };
    match result {
        Ok(d) => {
            let err: Vec<f64> = grid
                .nodes()
                .iter()
                .zip(&d.values)
                .map(|(&x, v)| v - f.derivative(x, cfg.derivative_order))
                .collect();
            if err.iter().all(|e| e.is_finite()) {
                row.e_inf = lp_error_norm(&err, f64::INFINITY, grid.dx);
                row.e_2 = lp_error_norm(&err, 2.0, grid.dx);
            } else {
                row.failure = Some("non-finite derivative".to_string());
            }
        }
        Err(reason) => row.failure = Some(reason),
    }
    row
}

/// Every (method, N) pair of the config, sorted by (method, N).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ConfigError> {
    run_experiment_with(cfg, Execution::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport, ConfigError> {
    let f = cfg.validate()?;
    let mut cells: Vec<(Method, usize)> = Vec::new();
    for &m in &cfg.methods {
        for &n in &cfg.n_list {
            if !cells.contains(&(m, n)) {
                cells.push((m, n));
            }
        }
    }
    let rows = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            cells.par_iter().map(|&(m, n)| run_row(cfg, &f, m, n)).collect()
        }
        _ => cells.iter().map(|&(m, n)| run_row(cfg, &f, m, n)).collect(),
    };
    let mut report = ExperimentReport { rows };
    report.sort();
    Ok(report)
}
