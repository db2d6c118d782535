use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use gfs_bench::{
    convergence_sweep, emit_csv, leakage_demo, run_experiment, write_csv, ExperimentConfig, ExperimentReport,
};

/// Differentiate a catalog function with GFS and baseline methods and report
/// the errors as CSV.
#[derive(Debug, Parser)]
#[command(name = "gfs-bench", version)]
struct Cli {
    /// key = value config file; flags given on the command line override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Catalog function: modulated_sine, gaussian, log_fn, multimode, ramp, cubic, monomial, leakage_demo.
    #[arg(long)]
    function: Option<String>,
    /// Function parameter override, e.g. `--param w=0.5` (repeatable).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// gfs, fft, fd, roache, eckhoff or prony (repeatable).
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Number of grid intervals (repeatable).
    #[arg(long = "N", value_name = "N")]
    n_list: Vec<usize>,
    /// GFS modes per family.
    #[arg(long = "n-modes")]
    n_modes: Option<usize>,
    /// Jumps used by Roache and Eckhoff.
    #[arg(long)]
    q: Option<usize>,
    /// Prony exponentials: a count, or `half` for N/2.
    #[arg(long = "prony-M", value_name = "M")]
    prony_m: Option<String>,
    /// `analytic` or `fd:<r>`.
    #[arg(long)]
    jumps: Option<String>,
    /// Interior stencil order of the fd method.
    #[arg(long = "fd-order")]
    fd_order: Option<usize>,
    /// Derivative order (GFS and FFT only above 1).
    #[arg(long)]
    order: Option<u32>,
    /// CSV destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also fit log-log convergence slopes (printed to stderr).
    #[arg(long)]
    sweep: bool,
    /// Write zero wall times so that reruns are byte-identical.
    #[arg(long = "no-timing")]
    no_timing: bool,
    /// Run the spectral-leakage demo at this N instead of a table.
    #[arg(long, value_name = "N")]
    leakage: Option<usize>,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let mut set = |key: &str, value: String| cfg.set(key, &value);
        if let Some(v) = &self.function {
            set("function", v.clone())?;
        }
        for p in &self.params {
            set("param", p.clone())?;
        }
        if !self.methods.is_empty() {
            cfg.methods.clear();
        }
        for m in &self.methods {
            cfg.set("method", m)?;
        }
        if !self.n_list.is_empty() {
            cfg.n_list = self.n_list.clone();
        }
        let mut set = |key: &str, value: String| cfg.set(key, &value);
        if let Some(v) = self.n_modes {
            set("n_modes", v.to_string())?;
        }
        if let Some(v) = self.q {
            set("q", v.to_string())?;
        }
        if let Some(v) = &self.prony_m {
            set("prony_M", v.clone())?;
        }
        if let Some(v) = &self.jumps {
            set("jumps", v.clone())?;
        }
        if let Some(v) = self.fd_order {
            set("fd_order", v.to_string())?;
        }
        if let Some(v) = self.order {
            set("order", v.to_string())?;
        }
        if let Some(v) = &self.out {
            cfg.output_path = Some(v.clone());
        }
        cfg.sweep |= self.sweep;
        cfg.timing &= !self.no_timing;
        if cfg.methods.is_empty() {
            cfg.methods = vec![gfs_bench::Method::Gfs];
        }
        Ok(cfg)
    }
}

fn write_report(report: &ExperimentReport, cfg: &ExperimentConfig) -> Result<()> {
    match &cfg.output_path {
        Some(path) => emit_csv(report, path)?,
        None => write_csv(report, io::stdout().lock()).context("cannot write to stdout")?,
    }
    for row in report.rows.iter().filter(|r| r.failed()) {
        eprintln!("note: {} N={} failed: {}", row.method, row.n, row.failure.as_deref().unwrap_or(""));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.config()?;
    if let Some(n) = cli.leakage {
        anyhow::ensure!(n >= 64, "the leakage demo needs N >= 64");
        let report = leakage_demo(n)?;
        match &cfg.output_path {
            Some(path) => {
                let file = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
                report.write_tsv(io::BufWriter::new(file)).with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => report.write_tsv(io::stdout().lock())?,
        }
        return Ok(());
    }
    if cfg.sweep {
        let result = convergence_sweep(&cfg)?;
        write_report(&result.report, &cfg)?;
        let mut err = io::stderr().lock();
        for (method, slope) in &result.slopes {
            match slope {
                Some(s) => writeln!(err, "slope {method}: {s:.3}")?,
                None => writeln!(err, "slope {method}: n/a")?,
            }
        }
    } else {
        write_report(&run_experiment(&cfg)?, &cfg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
