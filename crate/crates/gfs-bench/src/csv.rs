use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::run::ExperimentReport;

pub const CSV_HEADER: &str = "method,function,N,param,jump_source,e_inf,e_2,wall_ms";

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct EmitError {
    pub path: PathBuf,
    pub source: io::Error,
}

/// Six significant digits in scientific notation; non-finite values are `inf`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.5e}")
    } else {
        "inf".to_string()
    }
}

pub fn write_csv<W: Write>(report: &ExperimentReport, mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.function,
            r.n,
            r.param,
            r.jump_source,
            format_float(r.e_inf),
            format_float(r.e_2),
            format_float(r.wall_ms)
        )?;
    }
    out.flush()
}

pub fn emit_csv(report: &ExperimentReport, path: &Path) -> Result<(), EmitError> {
    let err = |source| EmitError { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(err)?;
    write_csv(report, BufWriter::new(file)).map_err(err)
}
