use std::f64::consts::PI;

use super::standard_jumps;
use crate::grid::SampledSignal;
use crate::jumps::JumpData;
use crate::spectral::periodic_derivative;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

// pi^p - (-pi)^p
fn odd_power_gap(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        0.0
    } else {
        2.0 * PI.powi(p as i32)
    }
}

/// Coefficients a_0..a_q of g(x) = sum a_k x^k whose jumps across [-pi, pi]
/// equal J_0..J_{q-1}. Top coefficient first:
/// a_q = J_{q-1} / (2pi q!), then for k = q-1 down to 1
/// a_k = (1/2pi) [J_{k-1}/k! - sum_{m>k} a_m m! / (k! (m-k+1)!) (pi^{m-k+1} - (-pi)^{m-k+1})].
/// a_0 does not affect any jump and is left at zero.
pub fn roache_coefficients(jumps: &[f64], q: usize) -> Vec<f64> {
    assert!(q >= 1 && jumps.len() >= q);
    let mut a = vec![0.0; q + 1];
    a[q] = jumps[q - 1] / (2.0 * PI * factorial(q));
    for k in (1..q).rev() {
        let mut s = jumps[k - 1] / factorial(k);
        for m in k + 1..=q {
            s -= a[m] * factorial(m) / (factorial(k) * factorial(m - k + 1)) * odd_power_gap(m - k + 1);
        }
        a[k] = s / (2.0 * PI);
    }
    a
}

/// FFT derivative of u - g plus the analytic derivative of g.
pub fn roache_derivative(u: &SampledSignal, jumps: &JumpData, q: usize) -> SampledSignal {
    let a = roache_coefficients(&standard_jumps(jumps, u, q), q);
    let xs = u.grid.standard_nodes();
    let g = |x: f64| a.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let dg = |x: f64| (1..a.len()).rev().fold(0.0, |acc, k| acc * x + k as f64 * a[k]);
    let n = u.grid.n;
    let rest: Vec<f64> = u.values[..n].iter().zip(&xs).map(|(v, &x)| v - g(x)).collect();
    let mut d = periodic_derivative(&rest, 1);
    d.push(d[0]);
    let chain = u.grid.chain_factor();
    let values = d.iter().zip(&xs).map(|(p, &x)| chain * (p + dg(x))).collect();
    SampledSignal { grid: u.grid, values }
}
