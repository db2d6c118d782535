//! Finite-difference stencils in exact arithmetic, endpoint jump estimation and
//! the classical finite-difference derivative.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::functions::TestFunction;
use crate::grid::SampledSignal;

/// Substitute for analytic jumps that are exactly zero.
pub const REGULARIZED_ZERO: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JumpError {
    #[error("grid with {nodes} nodes is too small for stencils of width {width}")]
    GridTooSmall { nodes: usize, width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Forward,
    Backward,
}

/// One-sided weights: `weights[i]` multiplies the sample `i` nodes away from
/// the boundary (into the domain), so the derivative is
/// `dx^-d * sum_i weights[i] * u[i]` (forward) or `u[N - i]` (backward).
#[derive(Debug, Clone, PartialEq)]
pub struct StencilWeights {
    pub d: usize,
    pub width: usize,
    pub side: Side,
    pub weights: Vec<BigRational>,
}

impl StencilWeights {
    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(rational_to_f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSource {
    Analytic,
    Fd { r: usize },
}

impl std::fmt::Display for JumpSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpSource::Analytic => write!(f, "analytic"),
            JumpSource::Fd { r } => write!(f, "fd:{r}"),
        }
    }
}

/// Endpoint jumps `J_m = u^(m)(b) - u^(m)(a)`, m = 0..q-1.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpData {
    pub values: Vec<f64>,
    pub source: JumpSource,
}

impl JumpData {
    pub fn new(values: Vec<f64>, source: JumpSource) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "jumps must be finite");
        Self { values, source }
    }

    pub fn q(&self) -> usize {
        self.values.len()
    }
}

// Exact weights for every derivative order on one set of consecutive integer
// offsets, plus their double-precision images.
struct StencilTable {
    exact: Vec<Vec<BigRational>>,
    float: Vec<Vec<f64>>,
}

type TableKey = (i64, usize);

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<StencilTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<StencilTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

// Weights on offsets start, start+1, ..., start+width-1.
fn stencil_table(start: i64, width: usize) -> Arc<StencilTable> {
    let key = (start, width);
    if let Some(t) = table_cache().lock().unwrap().get(&key) {
        return Arc::clone(t);
    }
    let table = Arc::new(build_table(start, width));
    Arc::clone(table_cache().lock().unwrap().entry(key).or_insert(table))
}

// The weight of node m for the d-th derivative is d! times the t^d
// coefficient of the Lagrange basis polynomial L_m(t).
fn build_table(start: i64, width: usize) -> StencilTable {
    let offsets: Vec<BigInt> = (0..width as i64).map(|i| BigInt::from(start + i)).collect();
    let mut factorials = vec![BigInt::one()];
    for k in 1..width {
        let next = &factorials[k - 1] * BigInt::from(k);
        factorials.push(next);
    }
    let mut exact = vec![Vec::with_capacity(width); width];
    for m in 0..width {
        let mut poly = vec![BigInt::one()];
        let mut denom = BigInt::one();
        for (j, oj) in offsets.iter().enumerate() {
            if j == m {
                continue;
            }
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * oj;
            }
            poly = next;
            denom *= &offsets[m] - oj;
        }
        for (d, row) in exact.iter_mut().enumerate() {
            row.push(BigRational::new(&factorials[d] * &poly[d], denom.clone()));
        }
    }
    let float = exact.iter().map(|row| row.iter().map(rational_to_f64).collect()).collect();
    StencilTable { exact, float }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("stencil weights fit in f64")
}

/// One-sided weights for the `d`-th derivative on `width` nodes.
pub fn fd_weights(d: usize, width: usize, side: Side) -> StencilWeights {
    assert!(width > d, "stencil width must exceed derivative order");
    let start = match side {
        Side::Forward => 0,
        Side::Backward => -(width as i64 - 1),
    };
    let table = stencil_table(start, width);
    let mut weights = table.exact[d].clone();
    if side == Side::Backward {
        // Table order runs from -(width-1) up to 0; report nearest node first.
        weights.reverse();
    }
    StencilWeights { d, width, side, weights }
}

fn float_weights(start: i64, width: usize, d: usize) -> Vec<f64> {
    stencil_table(start, width).float[d].clone()
}

/// Jumps from one-sided stencils of uniform width `q - 1 + r` at both ends;
/// `J_0` is taken directly from the endpoint samples.
pub fn estimate_jumps(u: &SampledSignal, q: usize, r: usize) -> Result<JumpData, JumpError> {
    assert!(q >= 1, "need at least one jump");
    let n = u.grid.n;
    let width = q - 1 + r;
    let nodes = n + 1;
    if nodes < 2 * width || width < q {
        return Err(JumpError::GridTooSmall { nodes, width });
    }
    let dx = u.grid.dx;
    let v = &u.values;
    let mut jumps = vec![v[n] - v[0]];
    for m in 1..q {
        let fw = float_weights(0, width, m);
        let bw = float_weights(-(width as i64 - 1), width, m);
        let left: f64 = fw.iter().zip(v).map(|(w, x)| w * x).sum();
        let right: f64 = bw.iter().zip(&v[n + 1 - width..]).map(|(w, x)| w * x).sum();
        jumps.push((right - left) / dx.powi(m as i32));
    }
    Ok(JumpData::new(jumps, JumpSource::Fd { r }))
}

/// Jumps from the closed-form catalog, with exact zeros replaced by
/// [`REGULARIZED_ZERO`].
pub fn jumps_from_analytic(f: &TestFunction, q: usize) -> JumpData {
    let values = (0..q as u32)
        .map(|m| {
            let j = f.analytic_jump(m);
            if j == 0.0 {
                REGULARIZED_ZERO
            } else {
                j
            }
        })
        .collect();
    JumpData::new(values, JumpSource::Analytic)
}

/// First derivative by the order-`r` central stencil in the interior and
/// shifted stencils of the same width `r + 1` near the boundaries.
pub fn fd_differentiate(u: &SampledSignal, r: usize) -> Result<SampledSignal, JumpError> {
    assert!((2..=8).contains(&r) && r.is_multiple_of(2), "order must be even and at most 8");
    let n = u.grid.n;
    if n < r {
        return Err(JumpError::GridTooSmall { nodes: n + 1, width: r + 1 });
    }
    let half = (r / 2) as i64;
    let last_start = (n - r) as i64;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n as i64 {
        let start = (i - half).clamp(0, last_start);
        let w = float_weights(start - i, r + 1, 1);
        let s: f64 = w
            .iter()
            .zip(&u.values[start as usize..start as usize + r + 1])
            .map(|(a, b)| a * b)
            .sum();
        out.push(s / u.grid.dx);
    }
    Ok(SampledSignal { grid: u.grid, values: out })
}
