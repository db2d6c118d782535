use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gfs::functions::{CatalogError, TestFunction};
use gfs::jumps::JumpSource;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("no grid sizes given")]
    NoGrids,
    #[error("no methods given")]
    NoMethods,
    #[error("N = {n} is too small for {method} with fd:{r} jumps and q = {q} (need N >= {needed})")]
    GridTooSmall { method: Method, n: usize, q: usize, r: usize, needed: usize },
    #[error("a convergence sweep needs at least 3 grid sizes, got {0}")]
    SweepTooShort(usize),
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), value: value.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Gfs,
    Fft,
    Fd,
    Roache,
    Eckhoff,
    Prony,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Gfs, Method::Fft, Method::Fd, Method::Roache, Method::Eckhoff, Method::Prony];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gfs => "gfs",
            Method::Fft => "fft",
            Method::Fd => "fd",
            Method::Roache => "roache",
            Method::Eckhoff => "eckhoff",
            Method::Prony => "prony",
        }
    }

    /// Methods that consume endpoint jumps.
    pub fn uses_jumps(self) -> bool {
        matches!(self, Method::Gfs | Method::Roache | Method::Eckhoff)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown method `{s}` (expected gfs, fft, fd, roache, eckhoff or prony)"))
    }
}

/// Where the jumps come from: closed form, or one-sided stencils of order r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSpec {
    Analytic,
    Fd(usize),
}

impl JumpSpec {
    pub fn source(self) -> JumpSource {
        match self {
            JumpSpec::Analytic => JumpSource::Analytic,
            JumpSpec::Fd(r) => JumpSource::Fd { r },
        }
    }
}

impl fmt::Display for JumpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.source().fmt(f)
    }
}

impl FromStr for JumpSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "analytic" {
            return Ok(JumpSpec::Analytic);
        }
        let r = s
            .strip_prefix("fd:")
            .or_else(|| s.strip_prefix("fd(").and_then(|t| t.strip_suffix(')')))
            .ok_or_else(|| format!("expected `analytic` or `fd:<r>`, got `{s}`"))?;
        let r: usize = r.parse().map_err(|_| format!("bad stencil order `{r}`"))?;
        if r == 0 {
            return Err("stencil order must be positive".to_string());
        }
        Ok(JumpSpec::Fd(r))
    }
}

/// Number of Prony exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PronyM {
    /// M = N / 2, every sample used.
    Half,
    Fixed(usize),
}

impl PronyM {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            PronyM::Half => n / 2,
            PronyM::Fixed(m) => m,
        }
    }
}

impl FromStr for PronyM {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "half" | "N/2" => Ok(PronyM::Half),
            t => t.parse().map(PronyM::Fixed).map_err(|_| format!("expected a count or `half`, got `{t}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function: String,
    pub params: Vec<(String, f64)>,
    pub methods: Vec<Method>,
    pub n_list: Vec<usize>,
    pub n_modes: usize,
    /// Jumps for Roache and Eckhoff.
    pub q: usize,
    /// None picks N/2, or N_k for multimode.
    pub prony_m: Option<PronyM>,
    pub jumps: JumpSpec,
    pub derivative_order: u32,
    /// Order of the interior stencil for the `fd` method.
    pub fd_order: usize,
    pub output_path: Option<PathBuf>,
    pub sweep: bool,
    /// Record wall time; off writes zeros so that reruns are byte-identical.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            function: "gaussian".to_string(),
            params: Vec::new(),
            methods: Vec::new(),
            n_list: Vec::new(),
            n_modes: 3,
            q: 8,
            prony_m: None,
            jumps: JumpSpec::Analytic,
            derivative_order: 1,
            fd_order: 6,
            output_path: None,
            sweep: false,
            timing: true,
        }
    }
}

fn parse_param(key: &str, text: &str) -> Result<(String, f64), ConfigError> {
    let (k, v) = text.split_once('=').ok_or_else(|| bad(key, text, "expected name=value"))?;
    let v: f64 = v.trim().parse().map_err(|_| bad(key, text, "not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse().map_err(|_| bad(key, value, "expected a non-negative integer"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. List keys (`method`, `N`, `param`)
    /// accumulate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key.trim() {
            "function" => self.function = v.to_string(),
            "param" | "params" => {
                for p in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    self.params.push(parse_param(key, p)?);
                }
            }
            "method" | "methods" => {
                for m in list(v) {
                    self.methods.push(m.parse().map_err(|e: String| bad(key, m, e))?);
                }
            }
            "N" | "n_list" => {
                for n in list(v) {
                    self.n_list.push(parse_count(key, n)?);
                }
            }
            "n_modes" | "n-modes" => self.n_modes = parse_count(key, v)?,
            "q" => self.q = parse_count(key, v)?,
            "prony_M" | "prony-M" | "M" => self.prony_m = Some(v.parse().map_err(|e: String| bad(key, v, e))?),
            "jumps" | "jump_source" => self.jumps = v.parse().map_err(|e: String| bad(key, v, e))?,
            "order" | "derivative_order" => {
                self.derivative_order = v.parse().map_err(|_| bad(key, v, "expected a positive integer"))?;
                if self.derivative_order == 0 {
                    return Err(bad(key, v, "derivative order must be at least 1"));
                }
            }
            "fd_order" | "fd-order" => self.fd_order = parse_count(key, v)?,
            "out" | "output" | "output_path" => self.output_path = Some(PathBuf::from(v)),
            "sweep" => self.sweep = parse_bool(key, v)?,
            "timing" => self.timing = parse_bool(key, v)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::parse_str(&text)
    }

    pub fn test_function(&self) -> Result<TestFunction, ConfigError> {
        Ok(TestFunction::from_name(&self.function, &self.params)?)
    }

    /// Jumps a method needs: 4 n for GFS, q for Roache and Eckhoff.
    pub fn jumps_needed(&self, method: Method) -> usize {
        match method {
            Method::Gfs => 4 * self.n_modes,
            Method::Roache | Method::Eckhoff => self.q,
            _ => 0,
        }
    }

    pub fn prony_m_for(&self, f: &TestFunction, n: usize) -> usize {
        match (self.prony_m, f) {
            (Some(rule), _) => rule.resolve(n),
            (None, TestFunction::Multimode { nk }) => *nk,
            (None, _) => n / 2,
        }
    }

    /// Checks the config and returns the resolved test function.
    pub fn validate(&self) -> Result<TestFunction, ConfigError> {
        let f = self.test_function()?;
        if self.n_list.is_empty() {
            return Err(ConfigError::NoGrids);
        }
        if self.methods.is_empty() {
            return Err(ConfigError::NoMethods);
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(bad("N", &n.to_string(), "need at least 2 intervals"));
        }
        if self.methods.contains(&Method::Fd) && (!(2..=8).contains(&self.fd_order) || self.fd_order % 2 == 1) {
            return Err(bad("fd_order", &self.fd_order.to_string(), "expected 2, 4, 6 or 8"));
        }
        for &method in &self.methods {
            let q = self.jumps_needed(method);
            if method.uses_jumps() && q == 0 {
                return Err(bad("q", "0", format!("{method} needs at least one jump")));
            }
            if let (true, JumpSpec::Fd(r)) = (method.uses_jumps(), self.jumps) {
                let needed = 2 * (q - 1 + r);
                if let Some(&n) = self.n_list.iter().find(|&&n| n < needed) {
                    return Err(ConfigError::GridTooSmall { method, n, q, r, needed });
                }
            }
        }
        if self.sweep && self.n_list.len() < 3 {
            return Err(ConfigError::SweepTooShort(self.n_list.len()));
        }
        Ok(f)
    }
}
