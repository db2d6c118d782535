use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::standard_jumps;
use crate::grid::SampledSignal;
use crate::jumps::JumpData;
use crate::spectral::periodic_derivative;

/// Bernoulli polynomials B_0..B_{max_order+1} as ascending monomial
/// coefficients, built from exact Bernoulli numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliBasis {
    pub max_order: usize,
    coefficients: Vec<Vec<f64>>,
    numbers: Vec<BigRational>,
}

impl BernoulliBasis {
    pub fn new(max_order: usize) -> Self {
        let top = max_order + 1;
        let binom = binomials(top + 1);
        // sum_{k<=m} C(m+1, k) B_k = 0, with B_1 = -1/2.
        let mut numbers: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..=top {
            let s = (0..m).fold(BigRational::zero(), |acc, k| {
                acc + BigRational::from_integer(binom[m + 1][k].clone()) * &numbers[k]
            });
            numbers.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        let coefficients = (0..=top)
            .map(|n| {
                let mut c = vec![0.0; n + 1];
                for (k, b) in numbers.iter().enumerate().take(n + 1) {
                    let exact = BigRational::from_integer(binom[n][k].clone()) * b;
                    c[n - k] = exact.to_f64().expect("finite");
                }
                c
            })
            .collect();
        Self { max_order, coefficients, numbers }
    }

    /// Shared basis up to B_32.
    pub fn standard() -> &'static BernoulliBasis {
        static BASIS: OnceLock<BernoulliBasis> = OnceLock::new();
        BASIS.get_or_init(|| BernoulliBasis::new(31))
    }

    pub fn number(&self, n: usize) -> &BigRational {
        &self.numbers[n]
    }

    fn eval(&self, m: usize, x: f64) -> f64 {
        self.coefficients[m].iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![BigInt::one(); i + 1];
        for k in 1..i {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// B_m(x) for 1 <= m <= max_order + 1.
pub fn bernoulli_polynomial(basis: &BernoulliBasis, m: usize, x: f64) -> f64 {
    assert!(m >= 1 && m <= basis.max_order + 1, "order {m} outside the basis");
    basis.eval(m, x)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

// V_m as a function of xi in [0, 2pi]; the endpoints give one-sided limits.
fn v_of_xi(basis: &BernoulliBasis, m: usize, xi: f64) -> f64 {
    -(2.0 * PI).powi(m as i32) / factorial(m + 1) * basis.eval(m + 1, xi / (2.0 * PI))
}

/// V_m(x; beta) = -(2pi)^m / (m+1)! B_{m+1}(xi / 2pi), xi = (x - beta) mod 2pi.
pub fn eckhoff_v(basis: &BernoulliBasis, m: usize, x: f64, beta: f64) -> f64 {
    let xi = (x - beta + 2.0 * PI).rem_euclid(2.0 * PI);
    v_of_xi(basis, m, xi)
}

/// Values and first derivatives of s(x) = sum_{m<q} A^m V_m(x; -pi) with
/// A^m = -J_m, at the grid nodes; the nodes at -pi and pi take the limits
/// from inside the interval.
pub fn eckhoff_singular_part(u: &SampledSignal, jumps: &JumpData, q: usize) -> (Vec<f64>, Vec<f64>) {
    let basis = BernoulliBasis::standard();
    assert!(q <= basis.max_order, "at most {} jumps supported", basis.max_order);
    let a: Vec<f64> = standard_jumps(jumps, u, q).iter().map(|j| -j).collect();
    let n = u.grid.n;
    let mut s = Vec::with_capacity(n + 1);
    let mut ds = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let xi = 2.0 * PI * i as f64 / n as f64;
        s.push((0..q).map(|m| a[m] * v_of_xi(basis, m, xi)).sum::<f64>());
        let mut d = if q > 0 { -a[0] / (2.0 * PI) } else { 0.0 };
        for m in 1..q {
            d += a[m] * v_of_xi(basis, m - 1, xi);
        }
        ds.push(d);
    }
    (s, ds)
}

/// FFT derivative of u - s plus the analytic derivative of s.
pub fn eckhoff_derivative(u: &SampledSignal, jumps: &JumpData, q: usize) -> SampledSignal {
    let n = u.grid.n;
    let (s, ds) = eckhoff_singular_part(u, jumps, q);
    let smooth: Vec<f64> = u.values[..n].iter().zip(&s).map(|(v, si)| v - si).collect();
    let mut dv = periodic_derivative(&smooth, 1);
    dv.push(dv[0]);
    let chain = u.grid.chain_factor();
    let values = dv.iter().zip(&ds).map(|(a, b)| chain * (a + b)).collect();
    SampledSignal { grid: u.grid, values }
}
