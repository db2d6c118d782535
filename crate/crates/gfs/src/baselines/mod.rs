//! Competitor methods: plain FFT differentiation and three ways of removing
//! the endpoint discontinuity before it (Roache polynomials, Eckhoff's
//! Bernoulli-polynomial expansion) or instead of it (Prony exponential fits).

mod eckhoff;
mod prony;
mod roache;

pub use eckhoff::{bernoulli_polynomial, eckhoff_derivative, eckhoff_singular_part, eckhoff_v, BernoulliBasis};
pub use prony::{prony_derivative, prony_derivative_signal, prony_fit, PronyError, PronyFit};
pub use roache::{roache_coefficients, roache_derivative};

use crate::grid::SampledSignal;
use crate::jumps::JumpData;
use crate::spectral::periodic_derivative;

/// Spectral derivative treating nodes 0..N-1 as one period; node N repeats node 0.
pub fn fft_derivative(u: &SampledSignal, order: u32) -> SampledSignal {
    let n = u.grid.n;
    let chain = u.grid.chain_factor().powi(order as i32);
    let mut values: Vec<f64> = periodic_derivative(&u.values[..n], order).iter().map(|v| v * chain).collect();
    values.push(values[0]);
    SampledSignal { grid: u.grid, values }
}

// Jumps with respect to the standard coordinate on [-pi, pi].
fn standard_jumps(jumps: &JumpData, u: &SampledSignal, q: usize) -> Vec<f64> {
    assert!(jumps.q() >= q, "{q} jumps needed, {} supplied", jumps.q());
    let f = 1.0 / u.grid.chain_factor();
    jumps.values[..q].iter().enumerate().map(|(m, v)| v * f.powi(m as i32)).collect()
}
