use std::f64::consts::PI;

use thiserror::Error;

use crate::functions::TestFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs b > a and N >= 8 (got a={a}, b={b}, N={n})")]
    InvalidGrid { a: f64, b: f64, n: usize },
    #[error("non-finite sample at node {index}")]
    BadSample { index: usize },
}

/// Uniform grid with `n` intervals and `n + 1` nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub dx: f64,
}

impl GridSpec {
    pub fn x(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.x(i)).collect()
    }

    /// Nodes mapped onto [-pi, pi].
    pub fn standard_nodes(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|i| -PI + 2.0 * PI * i as f64 / self.n as f64)
            .collect()
    }

    /// d/dx = chain_factor * d/dx* where x* is the standard coordinate.
    pub fn chain_factor(&self) -> f64 {
        2.0 * PI / (self.b - self.a)
    }
}

pub fn make_grid(a: f64, b: f64, n: usize) -> Result<GridSpec, GridError> {
    if !(b > a) || n < 8 || !a.is_finite() || !b.is_finite() {
        return Err(GridError::InvalidGrid { a, b, n });
    }
    Ok(GridSpec { a, b, n, dx: (b - a) / n as f64 })
}

/// Affine map of [a, b] onto [-pi, pi].
pub fn to_standard_interval(x: f64, grid: &GridSpec) -> f64 {
    let x0 = 0.5 * (grid.a + grid.b);
    2.0 * PI * (x - x0) / (grid.b - grid.a)
}

/// Discrete L^p norm `(dx * sum |e_i|^p)^(1/p)`; for `p = inf` the plain maximum.
pub fn lp_error_norm(e: &[f64], p: f64, dx: f64) -> f64 {
    assert!(!e.is_empty(), "error vector must be non-empty");
    if p.is_infinite() {
        return e.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return (dx * e.iter().map(|v| v * v).sum::<f64>()).sqrt();
    }
    (dx * e.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, GridError> {
        assert_eq!(values.len(), grid.n + 1, "signal needs N+1 values");
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::BadSample { index });
        }
        Ok(Self { grid, values })
    }
}

pub fn sample(f: &TestFunction, grid: &GridSpec) -> Result<SampledSignal, GridError> {
    SampledSignal::new(*grid, grid.nodes().iter().map(|&x| f.value(x)).collect())
}
