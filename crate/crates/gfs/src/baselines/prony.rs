use thiserror::Error;

use crate::grid::SampledSignal;
use crate::numerics::{polynomial_roots, solve_least_squares, solve_square, ComplexMatrix, NumericsError, PolynomialCoeffs, C64};

/// The fitted sum may miss its own defining samples by at most this multiple
/// of their largest magnitude before the fit is declared a blow-up.
pub const PRONY_RESIDUAL_TOL: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PronyError {
    #[error("Prony system is ill-conditioned (condition estimate {condition:e}, relative residual {residual:e})")]
    IllConditioned { condition: f64, residual: f64 },
    #[error("{needed} samples needed for M = {m}, {available} available")]
    TooFewSamples { m: usize, needed: usize, available: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// h(x) = sum_j c_j exp(phi_j (x - x0)).
#[derive(Debug, Clone, PartialEq)]
pub struct PronyFit {
    pub c: Vec<C64>,
    pub phi: Vec<C64>,
    pub dx: f64,
    pub x0: f64,
}

impl PronyFit {
    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.c.iter().zip(&self.phi).map(|(c, p)| c * (p * (x - self.x0)).exp()).sum::<C64>().re
    }
}

/// Classical Prony fit with `m` exponentials through the first 2m samples.
/// Both linear systems are solved directly, without regularization, as the
/// method prescribes; a fit that cannot reproduce its own samples is
/// reported as [`PronyError::IllConditioned`].
pub fn prony_fit(u: &SampledSignal, m: usize) -> Result<PronyFit, PronyError> {
    let dx = u.grid.dx;
    let x0 = u.grid.a;
    if m == 0 {
        return Ok(PronyFit { c: Vec::new(), phi: Vec::new(), dx, x0 });
    }
    let available = u.values.len();
    if available < 2 * m {
        return Err(PronyError::TooFewSamples { m, needed: 2 * m, available });
    }
    let h: Vec<C64> = u.values[..2 * m].iter().map(|&v| C64::new(v, 0.0)).collect();

    // sum_{k<m} p_k h_{k+i} = -h_{m+i}, i = 0..m-1, with p_m = 1.
    let hankel = ComplexMatrix::from_fn(m, m, |i, k| h[k + i])?;
    let rhs: Vec<C64> = (0..m).map(|i| -h[m + i]).collect();
    let condition = solve_least_squares(&hankel, &rhs, f64::MIN_POSITIVE).condition_estimate();
    let ill = |residual: f64| PronyError::IllConditioned { condition, residual };
    let p = solve_square(&hankel, &rhs).map_err(|_| ill(f64::INFINITY))?;
    if p.iter().any(|v| !v.is_finite()) {
        return Err(ill(f64::INFINITY));
    }
    let mut coeffs = p;
    coeffs.push(C64::new(1.0, 0.0));
    let z = polynomial_roots(&PolynomialCoeffs::new(coeffs)).map_err(|_| ill(f64::INFINITY))?;
    if z.iter().any(|zj| *zj == C64::new(0.0, 0.0)) {
        return Err(ill(f64::INFINITY));
    }

    let vandermonde = match ComplexMatrix::from_fn(m, m, |i, j| z[j].powu(i as u32)) {
        Ok(v) => v,
        Err(_) => return Err(ill(f64::INFINITY)),
    };
    let c = solve_square(&vandermonde, &h[..m]).map_err(|_| ill(f64::INFINITY))?;

    let scale = h.iter().fold(0.0_f64, |a, v| a.max(v.norm())).max(f64::MIN_POSITIVE);
    let mut residual = 0.0_f64;
    for (i, hi) in h.iter().enumerate() {
        let fit: C64 = c.iter().zip(&z).map(|(cj, zj)| cj * zj.powu(i as u32)).sum();
        residual = residual.max((fit - hi).norm() / scale);
    }
    if !(residual <= PRONY_RESIDUAL_TOL) {
        return Err(ill(residual));
    }
    let phi = z.iter().map(|zj| zj.ln() / dx).collect();
    Ok(PronyFit { c, phi, dx, x0 })
}

/// Re sum_j c_j phi_j exp(phi_j (x - x0)).
pub fn prony_derivative(fit: &PronyFit, x: f64) -> f64 {
    fit.c
        .iter()
        .zip(&fit.phi)
        .map(|(c, p)| c * p * (p * (x - fit.x0)).exp())
        .sum::<C64>()
        .re
}

pub fn prony_derivative_signal(fit: &PronyFit, u: &SampledSignal) -> SampledSignal {
    let values = u.grid.nodes().iter().map(|&x| prony_derivative(fit, x)).collect();
    SampledSignal { grid: u.grid, values }
}
