//! Closed-form test functions on [-pi, pi] with derivatives of any order.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),
    #[error("function `{function}` has no parameter `{param}`")]
    UnknownParam { function: String, param: String },
    #[error("parameter `{param}` of `{function}` is out of range: {value}")]
    BadParam { function: String, param: String, value: f64 },
}

/// One term `amplitude * sin(k x)` or `amplitude * cos(k x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub amplitude: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// e^{a(x+pi)} sin(b(x+pi))
    ModulatedSine { a: f64, b: f64 },
    /// exp(-((x - x0)/w)^2)
    Gaussian { x0: f64, w: f64 },
    /// log(x + pi + 1/2)
    LogFn,
    /// sum over j < nk of sin(k_j x) + cos(k_j x) with non-integer k_j
    Multimode { nk: usize },
    /// x^m
    Monomial { m: u32 },
    /// 0.7 sin(5.3 x) + sin(12.4 x) by default
    LeakageDemo { a1: f64, k1: f64, a2: f64, k2: f64 },
    /// Arbitrary finite sine/cosine sum; integer wavenumbers make it periodic.
    Sinusoids { sines: Vec<Term>, cosines: Vec<Term> },
}

impl TestFunction {
    pub fn modulated_sine() -> Self {
        TestFunction::ModulatedSine { a: -1.0 / PI, b: 0.75 }
    }

    pub fn gaussian() -> Self {
        TestFunction::Gaussian { x0: 0.75 * PI, w: 1.0 }
    }

    pub fn multimode() -> Self {
        TestFunction::Multimode { nk: 30 }
    }

    pub fn leakage_demo() -> Self {
        TestFunction::LeakageDemo { a1: 0.7, k1: 5.3, a2: 1.0, k2: 12.4 }
    }

    /// Trigonometric polynomial with integer modes: `(k, a_k, b_k)` gives
    /// `a_k cos(k x) + b_k sin(k x)`.
    pub fn trig_poly(terms: &[(u32, f64, f64)]) -> Self {
        TestFunction::Sinusoids {
            cosines: terms.iter().map(|&(k, a, _)| Term { amplitude: a, k: k as f64 }).collect(),
            sines: terms.iter().map(|&(k, _, b)| Term { amplitude: b, k: k as f64 }).collect(),
        }
    }

    /// Looks a function up by catalog name and applies `key=value` overrides.
    pub fn from_name(name: &str, params: &[(String, f64)]) -> Result<Self, CatalogError> {
        let mut f = match name {
            "modulated_sine" => Self::modulated_sine(),
            "gaussian" => Self::gaussian(),
            "log_fn" | "log" => TestFunction::LogFn,
            "multimode" => Self::multimode(),
            "monomial" => TestFunction::Monomial { m: 1 },
            "ramp" => TestFunction::Monomial { m: 1 },
            "cubic" => TestFunction::Monomial { m: 3 },
            "leakage_demo" => Self::leakage_demo(),
            _ => return Err(CatalogError::UnknownFunction(name.to_string())),
        };
        for (key, value) in params {
            f.set_param(name, key, *value)?;
        }
        Ok(f)
    }

    fn set_param(&mut self, fname: &str, key: &str, value: f64) -> Result<(), CatalogError> {
        let unknown = || CatalogError::UnknownParam { function: fname.to_string(), param: key.to_string() };
        let bad = || CatalogError::BadParam { function: fname.to_string(), param: key.to_string(), value };
        match self {
            TestFunction::ModulatedSine { a, b } => match key {
                "a" => *a = value,
                "b" => *b = value,
                _ => return Err(unknown()),
            },
            TestFunction::Gaussian { x0, w } => match key {
                "x0" => *x0 = value,
                "w" if value > 0.0 => *w = value,
                "w" => return Err(bad()),
                _ => return Err(unknown()),
            },
            TestFunction::Multimode { nk } => match key {
                "nk" | "Nk" if value >= 2.0 && value.fract() == 0.0 => *nk = value as usize,
                "nk" | "Nk" => return Err(bad()),
                _ => return Err(unknown()),
            },
            TestFunction::Monomial { m } => match key {
                "m" if value >= 0.0 && value.fract() == 0.0 => *m = value as u32,
                "m" => return Err(bad()),
                _ => return Err(unknown()),
            },
            TestFunction::LeakageDemo { a1, k1, a2, k2 } => match key {
                "a1" => *a1 = value,
                "k1" => *k1 = value,
                "a2" => *a2 = value,
                "k2" => *k2 = value,
                _ => return Err(unknown()),
            },
            TestFunction::LogFn | TestFunction::Sinusoids { .. } => return Err(unknown()),
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::ModulatedSine { .. } => "modulated_sine",
            TestFunction::Gaussian { .. } => "gaussian",
            TestFunction::LogFn => "log_fn",
            TestFunction::Multimode { .. } => "multimode",
            TestFunction::Monomial { .. } => "monomial",
            TestFunction::LeakageDemo { .. } => "leakage_demo",
            TestFunction::Sinusoids { .. } => "sinusoids",
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// d^order u / dx^order at x.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        match self {
            TestFunction::ModulatedSine { a, b } => {
                let s = Complex64::new(*a, *b);
                (s.powu(order) * (s * (x + PI)).exp()).im
            }
            TestFunction::Gaussian { x0, w } => {
                let t = (x - x0) / w;
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * hermite(order, t) * (-t * t).exp() / w.powi(order as i32)
            }
            TestFunction::LogFn => {
                let y = x + PI + 0.5;
                if order == 0 {
                    return y.ln();
                }
                let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                sign * factorial(order - 1) / y.powi(order as i32)
            }
            TestFunction::Multimode { nk } => multimode_modes(*nk)
                .iter()
                .map(|&k| k.powi(order as i32) * (shifted_sin(k * x, order) + shifted_cos(k * x, order)))
                .sum(),
            TestFunction::Monomial { m } => {
                if order > *m {
                    return 0.0;
                }
                let coeff = factorial(*m) / factorial(*m - order);
                coeff * x.powi((*m - order) as i32)
            }
            TestFunction::LeakageDemo { .. } => self.as_sinusoids().derivative(x, order),
            TestFunction::Sinusoids { sines, cosines } => {
                let s: f64 = sines
                    .iter()
                    .map(|t| t.amplitude * t.k.powi(order as i32) * shifted_sin(t.k * x, order))
                    .sum();
                let c: f64 = cosines
                    .iter()
                    .map(|t| t.amplitude * t.k.powi(order as i32) * shifted_cos(t.k * x, order))
                    .sum();
                s + c
            }
        }
    }

    /// J_m = u^(m)(pi) - u^(m)(-pi). Sinusoidal sums use the closed form
    /// 2 sin(k pi) k^m (cos(m pi/2) or -sin(m pi/2)), which is exactly zero
    /// for integer k.
    pub fn analytic_jump(&self, order: u32) -> f64 {
        match self {
            TestFunction::Multimode { nk } => {
                let ks = multimode_modes(*nk);
                let terms: Vec<Term> = ks.iter().map(|&k| Term { amplitude: 1.0, k }).collect();
                sinusoid_jump(&terms, &terms, order)
            }
            TestFunction::LeakageDemo { .. } => self.as_sinusoids().analytic_jump(order),
            TestFunction::Sinusoids { sines, cosines } => sinusoid_jump(sines, cosines, order),
            _ => self.derivative(PI, order) - self.derivative(-PI, order),
        }
    }

    fn as_sinusoids(&self) -> TestFunction {
        match self {
            TestFunction::LeakageDemo { a1, k1, a2, k2 } => TestFunction::Sinusoids {
                sines: vec![Term { amplitude: *a1, k: *k1 }, Term { amplitude: *a2, k: *k2 }],
                cosines: Vec::new(),
            },
            other => other.clone(),
        }
    }
}

/// k_j = j + 1/nk + (j/nk)(nk-2)/(nk-1), j = 0..nk-1.
pub fn multimode_modes(nk: usize) -> Vec<f64> {
    let n = nk as f64;
    (0..nk)
        .map(|j| {
            let j = j as f64;
            j + 1.0 / n + (j / n) * (n - 2.0) / (n - 1.0)
        })
        .collect()
}

fn sinusoid_jump(sines: &[Term], cosines: &[Term], order: u32) -> f64 {
    let sin_kpi = |k: f64| if k.fract() == 0.0 { 0.0 } else { (k * PI).sin() };
    let (c, s) = match order % 4 {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    };
    let a: f64 = sines
        .iter()
        .map(|t| 2.0 * c * t.amplitude * t.k.powi(order as i32) * sin_kpi(t.k))
        .sum();
    let b: f64 = cosines
        .iter()
        .map(|t| -2.0 * s * t.amplitude * t.k.powi(order as i32) * sin_kpi(t.k))
        .sum();
    a + b
}

/// sin(z + m pi/2) without rounding the phase.
pub fn shifted_sin(z: f64, m: u32) -> f64 {
    match m % 4 {
        0 => z.sin(),
        1 => z.cos(),
        2 => -z.sin(),
        _ => -z.cos(),
    }
}

/// cos(z + m pi/2) without rounding the phase.
pub fn shifted_cos(z: f64, m: u32) -> f64 {
    match m % 4 {
        0 => z.cos(),
        1 => -z.sin(),
        2 => -z.cos(),
        _ => z.sin(),
    }
}

// Physicists' Hermite polynomial H_n(t).
fn hermite(n: u32, t: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * t;
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
