//! Generalized Fourier series: the non-periodic part of a sampled function is
//! written as a short sum of non-harmonic sines and cosines whose wavenumbers
//! and amplitudes are fixed by the endpoint jumps. What remains is periodic
//! and smooth across the seam, and is differentiated with the FFT.

use std::f64::consts::PI;

use thiserror::Error;

use crate::functions::TestFunction;
use crate::grid::{GridSpec, SampledSignal};
use crate::jumps::{JumpData, REGULARIZED_ZERO};
use crate::numerics::{
    complex_principal_sqrt, polynomial_roots, solve_least_squares, solve_transposed_vandermonde,
    ComplexMatrix, NumericsError, PolynomialCoeffs, C64, NODE_COINCIDENCE_TOL,
};
use crate::spectral::periodic_derivative;

/// Modes with |sin(k pi)| below this carry no jump information and are dropped.
pub const NEAR_HARMONIC_TOL: f64 = 1e-12;
/// Cosine modes with |k| below this are constants and are dropped.
pub const ZERO_MODE_TOL: f64 = 1e-12;
/// A family whose jumps are all at most this (regularized zeros) is empty.
pub const ZERO_FAMILY_TOL: f64 = 10.0 * REGULARIZED_ZERO;
/// Relative bound on the imaginary residue of an evaluated model.
pub const REALNESS_TOL: f64 = 1e-10;

const PAIRING_TOL: f64 = 1e-6;
// Below this |k| a cosine mode is evaluated without its constant part.
const SMALL_COSINE_K: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GfsError {
    #[error("mode roots collapsed; retry with {n} modes")]
    ShrinkRank { n: usize },
    #[error("aperiodic part has imaginary residue {imag:e} at x = {x}")]
    RealnessViolation { x: f64, imag: f64 },
    #[error("{needed} jumps needed, {got} supplied")]
    NotEnoughJumps { needed: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Even jumps J_0, J_2, ... feed the sine family; odd jumps J_1, J_3, ... the
/// cosine family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn select(self, jumps: &[f64], count: usize) -> Vec<f64> {
        let offset = match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        (0..count).map(|i| jumps[2 * i + offset]).collect()
    }
}

/// One non-harmonic mode. `weight` is the solver quantity w = 2 u sin(k pi)
/// for sines and w = -2 u k sin(k pi) for cosines; keeping w rather than the
/// amplitude u keeps strongly growing modes (large Im k) representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub k: C64,
    pub weight: C64,
}

impl Mode {
    pub fn from_amplitude(k: C64, amplitude: C64, parity: Parity) -> Self {
        let s = (k * PI).sin();
        let weight = match parity {
            Parity::Even => 2.0 * amplitude * s,
            Parity::Odd => -2.0 * amplitude * k * s,
        };
        Mode { k, weight }
    }

    pub fn amplitude(&self, parity: Parity) -> C64 {
        let s = (self.k * PI).sin();
        match parity {
            Parity::Even => self.weight / (2.0 * s),
            Parity::Odd => -self.weight / (2.0 * self.k * s),
        }
    }
}

/// u_a(x) = sum_j u_j sin(k_j x) + sum_j v_j cos(kc_j x) on [-pi, pi].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AperiodicModel {
    pub sine_modes: Vec<Mode>,
    pub cosine_modes: Vec<Mode>,
}

impl AperiodicModel {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a model from `(k, amplitude)` pairs.
    pub fn from_amplitudes(sines: &[(C64, C64)], cosines: &[(C64, C64)]) -> Self {
        Self {
            sine_modes: sines.iter().map(|&(k, a)| Mode::from_amplitude(k, a, Parity::Even)).collect(),
            cosine_modes: cosines.iter().map(|&(k, a)| Mode::from_amplitude(k, a, Parity::Odd)).collect(),
        }
    }

    pub fn n_s(&self) -> usize {
        self.sine_modes.len()
    }

    pub fn n_c(&self) -> usize {
        self.cosine_modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sine_modes.is_empty() && self.cosine_modes.is_empty()
    }

    pub fn sine_amplitudes(&self) -> Vec<(C64, C64)> {
        self.sine_modes.iter().map(|m| (m.k, m.amplitude(Parity::Even))).collect()
    }

    pub fn cosine_amplitudes(&self) -> Vec<(C64, C64)> {
        self.cosine_modes.iter().map(|m| (m.k, m.amplitude(Parity::Odd))).collect()
    }

    /// Complex value of the `order`-th derivative of one family at x, and the
    /// sum of term magnitudes (the scale against which rounding is judged).
    pub fn evaluate_family(&self, parity: Parity, x: f64, order: u32) -> (C64, f64) {
        let modes = match parity {
            Parity::Even => &self.sine_modes,
            Parity::Odd => &self.cosine_modes,
        };
        let mut sum = C64::new(0.0, 0.0);
        let mut scale = 0.0;
        for m in modes {
            let term = match parity {
                Parity::Even => 0.5 * m.weight * m.k.powu(order) * ratio_to_sin_kpi(m.k, x, order, false),
                Parity::Odd if order == 0 && m.k.norm() < SMALL_COSINE_K => {
                    // cos(kx) - 1 = -2 sin^2(kx/2): the dropped constant is a
                    // harmonic and would otherwise swamp u_p as k -> 0.
                    let half = (0.5 * m.k * x).sin();
                    m.weight * half * half / (m.k * (m.k * PI).sin())
                }
                Parity::Odd => -0.5 * m.weight * m.k.powi(order as i32 - 1) * ratio_to_sin_kpi(m.k, x, order, true),
            };
            sum += term;
            scale += term.norm();
        }
        (sum, scale)
    }

    /// Jump J_m of the model across [-pi, pi] from the closed form
    /// sum_j (-k_j^2)^(m/2) w_j over the family that carries order m.
    pub fn jump(&self, m: u32) -> f64 {
        let (modes, p) = if m.is_multiple_of(2) {
            (&self.sine_modes, m / 2)
        } else {
            (&self.cosine_modes, (m - 1) / 2)
        };
        modes
            .iter()
            .map(|md| (-(md.k * md.k)).powu(p) * md.weight)
            .sum::<C64>()
            .re
    }
}

// sin(k x + order pi/2) / sin(k pi), or cos(...) / sin(k pi), evaluated from
// exponentially rescaled trig functions so that neither factor overflows when
// Im k is large.
fn ratio_to_sin_kpi(k: C64, x: f64, order: u32, cosine: bool) -> C64 {
    let z = k * x;
    let zpi = k * PI;
    let numer = if cosine {
        scaled_cos(z, order)
    } else {
        scaled_sin(z, order)
    };
    numer / scaled_sin(zpi, 0) * (z.im.abs() - zpi.im.abs()).exp()
}

const DIRECT_LIMIT: f64 = 300.0;

// e^{-|Im z|} sin(z + quarter pi/2)
fn scaled_sin(z: C64, quarter: u32) -> C64 {
    match quarter % 4 {
        0 => scaled_trig(z, false),
        1 => scaled_trig(z, true),
        2 => -scaled_trig(z, false),
        _ => -scaled_trig(z, true),
    }
}

// e^{-|Im z|} cos(z + quarter pi/2)
fn scaled_cos(z: C64, quarter: u32) -> C64 {
    match quarter % 4 {
        0 => scaled_trig(z, true),
        1 => -scaled_trig(z, false),
        2 => -scaled_trig(z, true),
        _ => scaled_trig(z, false),
    }
}

fn scaled_trig(z: C64, cosine: bool) -> C64 {
    let y = z.im.abs();
    if y < DIRECT_LIMIT {
        let f = if cosine { z.cos() } else { z.sin() };
        return f * (-y).exp();
    }
    let i = C64::new(0.0, 1.0);
    let plus = (i * z - y).exp();
    let minus = (-i * z - y).exp();
    if cosine {
        0.5 * (plus + minus)
    } else {
        (plus - minus) / (2.0 * i)
    }
}

/// Real value of the `order`-th derivative of u_a at x.
pub fn evaluate_aperiodic(model: &AperiodicModel, x: f64, order: u32) -> Result<f64, GfsError> {
    let (s, ss) = model.evaluate_family(Parity::Even, x, order);
    let (c, cs) = model.evaluate_family(Parity::Odd, x, order);
    let total = s + c;
    if !(total.im.abs() <= REALNESS_TOL * (1.0 + ss + cs)) {
        return Err(GfsError::RealnessViolation { x, imag: total.im });
    }
    Ok(total.re)
}

/// Solver knobs. The defaults are what the library uses everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfsOptions {
    pub n_sine: usize,
    pub n_cosine: usize,
    /// Rescale lambda -> lambda / s so that the Hankel entries have
    /// comparable magnitude before the pseudoinverse.
    pub hankel_scaling: bool,
    /// Relative singular-value cutoff; 0 selects the kernel default.
    pub rank_tol: f64,
}

impl GfsOptions {
    pub fn new(n: usize) -> Self {
        Self { n_sine: n, n_cosine: n, hankel_scaling: true, rank_tol: 0.0 }
    }
}

// Geometric scale s so that J_p[m] / s^m is balanced between the two halves
// of the 2n jumps.
fn hankel_scale(jp: &[f64], n: usize, enabled: bool) -> f64 {
    if !enabled || n < 2 {
        return 1.0;
    }
    let hi = jp[n..2 * n].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lo = jp[..n].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if hi > 0.0 && lo > 0.0 {
        (hi / lo).powf(1.0 / n as f64).max(1.0)
    } else {
        1.0
    }
}

// (e_n, ..., e_1) for the scaled jumps, and the rank of the Hankel matrix.
fn hankel_solve(js: &[f64], n: usize, rank_tol: f64) -> (Vec<C64>, usize) {
    let h = ComplexMatrix::from_fn(n, n, |i, j| C64::new(js[i + j], 0.0)).expect("jumps are finite");
    let rhs: Vec<C64> = (0..n).map(|i| C64::new(-js[n + i], 0.0)).collect();
    let sol = solve_least_squares(&h, &rhs, rank_tol);
    // Real data: the exact solution is real.
    (sol.x.iter().map(|z| C64::new(z.re, 0.0)).collect(), sol.rank)
}

// lambda^n - e_1 lambda^{n-1} + ... + (-1)^n e_n from (e_n, ..., e_1).
fn characteristic(e_desc: &[C64]) -> PolynomialCoeffs {
    let n = e_desc.len();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    for i in 1..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        c[n - i] = sign * e_desc[n - i];
    }
    PolynomialCoeffs::new(c)
}

fn distinct_count(roots: &[C64]) -> usize {
    let mut reps: Vec<C64> = Vec::new();
    for &r in roots {
        let dup = reps.iter().any(|&s| {
            (r - s).norm() / r.norm().max(s.norm()).max(1.0) < NODE_COINCIDENCE_TOL
        });
        if !dup {
            reps.push(r);
        }
    }
    reps.len()
}

/// Elementary symmetric polynomials of the squared wavenumbers of one family,
/// in the order (e_n, ..., e_1), with the numerical rank of the jump Hankel
/// matrix. Uses the first 2n jumps of the requested parity.
pub fn solve_elementary_symmetric(
    jumps: &JumpData,
    parity: Parity,
    n: usize,
) -> Result<(Vec<C64>, usize), GfsError> {
    if jumps.q() < 4 * n {
        return Err(GfsError::NotEnoughJumps { needed: 4 * n, got: jumps.q() });
    }
    let jp = parity.select(&jumps.values, 2 * n);
    let s = hankel_scale(&jp, n, true);
    let js: Vec<f64> = jp.iter().enumerate().map(|(m, v)| v / s.powi(m as i32)).collect();
    let (e, rank) = hankel_solve(&js, n, 0.0);
    // e_i scales like s^i; entry j holds e_{n-j}.
    let e = e.iter().enumerate().map(|(j, v)| v * s.powi((n - j) as i32)).collect();
    Ok((e, rank))
}

/// Wavenumbers from (e_1, ..., e_n): principal square roots of the roots of
/// the characteristic polynomial.
pub fn modes_from_symmetric(e: &[C64]) -> Result<Vec<C64>, GfsError> {
    let desc: Vec<C64> = e.iter().rev().copied().collect();
    let lambda = polynomial_roots(&characteristic(&desc))?;
    let distinct = distinct_count(&lambda);
    if distinct < lambda.len() {
        return Err(GfsError::ShrinkRank { n: distinct });
    }
    Ok(lambda.into_iter().map(complex_principal_sqrt).collect())
}

/// Amplitudes for given wavenumbers of one family from its first n jumps.
/// Near-harmonic and zero-wavenumber cosine modes get amplitude zero.
pub fn solve_mode_amplitudes(modes: &[C64], jumps: &JumpData, parity: Parity) -> Result<Vec<C64>, GfsError> {
    let n = modes.len();
    if jumps.q() < 2 * n {
        return Err(GfsError::NotEnoughJumps { needed: 2 * n, got: jumps.q() });
    }
    let jp: Vec<C64> = parity.select(&jumps.values, n).into_iter().map(|v| C64::new(v, 0.0)).collect();
    let nodes: Vec<C64> = modes.iter().map(|k| -(k * k)).collect();
    let w = solve_transposed_vandermonde(&nodes, &jp).map_err(|e| match e {
        NumericsError::DegenerateNodes { .. } => GfsError::ShrinkRank { n: distinct_count(&nodes) },
        other => GfsError::Numerics(other),
    })?;
    Ok(modes
        .iter()
        .zip(w)
        .map(|(&k, weight)| {
            if dropped(k, parity) {
                C64::new(0.0, 0.0)
            } else {
                Mode { k, weight }.amplitude(parity)
            }
        })
        .collect())
}

fn dropped(k: C64, parity: Parity) -> bool {
    (parity == Parity::Odd && k.norm() < ZERO_MODE_TOL) || (k * PI).sin().norm() < NEAR_HARMONIC_TOL
}

// Full pipeline for one family, shrinking n until the roots are distinct.
fn solve_family(jp_all: &[f64], n: usize, parity: Parity, opts: &GfsOptions) -> Vec<Mode> {
    let mut n = n;
    while n > 0 {
        let jp = &jp_all[..2 * n];
        if jp.iter().all(|v| v.abs() <= ZERO_FAMILY_TOL) {
            return Vec::new();
        }
        let s = hankel_scale(jp, n, opts.hankel_scaling);
        let js: Vec<f64> = jp.iter().enumerate().map(|(m, v)| v / s.powi(m as i32)).collect();
        let (e, _rank) = hankel_solve(&js, n, opts.rank_tol);
        let lambda = match polynomial_roots(&characteristic(&e)) {
            Ok(l) => l,
            Err(_) => {
                n -= 1;
                continue;
            }
        };
        let distinct = distinct_count(&lambda);
        if distinct < n {
            n = distinct;
            continue;
        }
        let nodes: Vec<C64> = lambda.iter().map(|l| -l).collect();
        let rhs: Vec<C64> = js[..n].iter().map(|&v| C64::new(v, 0.0)).collect();
        let mut w = match solve_transposed_vandermonde(&nodes, &rhs) {
            Ok(w) if w.iter().all(|z| z.is_finite()) => w,
            _ => {
                n -= 1;
                continue;
            }
        };
        let mut lambda = lambda;
        polish_moments(&mut lambda, &mut w, &js);
        enforce_conjugate_pairs(&mut lambda, &mut w);
        return lambda
            .iter()
            .zip(&w)
            .map(|(&l, &weight)| Mode { k: complex_principal_sqrt(l * s), weight })
            .filter(|m| !dropped(m.k, parity))
            .collect();
    }
    Vec::new()
}

// Largest relative misfit of sum_j w_j (-lambda_j)^m = js[m], m < 2n.
fn moment_misfit(lambda: &[C64], w: &[C64], js: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (m, &target) in js.iter().enumerate() {
        let mut sum = C64::new(-target, 0.0);
        let mut scale = target.abs();
        for (l, wj) in lambda.iter().zip(w) {
            let t = wj * (-l).powu(m as u32);
            sum += t;
            scale += t.norm();
        }
        if scale > 0.0 {
            worst = worst.max(sum.norm() / scale);
        }
    }
    worst
}

// Newton steps on the 2n moment equations in (lambda, w). The Hankel route
// loses accuracy through the characteristic polynomial; a few steps on the
// original equations win most of it back. Steps that do not reduce the
// misfit are discarded.
fn polish_moments(lambda: &mut [C64], w: &mut [C64], js: &[f64]) {
    let n = lambda.len();
    let mut misfit = moment_misfit(lambda, w, js);
    for _ in 0..3 {
        if !(misfit > f64::EPSILON) {
            return;
        }
        let jac = ComplexMatrix::from_fn(2 * n, 2 * n, |m, c| {
            let j = c % n;
            let x = -lambda[j];
            if c < n {
                x.powu(m as u32)
            } else if m == 0 {
                C64::new(0.0, 0.0)
            } else {
                -w[j] * (m as f64) * x.powu(m as u32 - 1)
            }
        });
        let Ok(jac) = jac else { return };
        let rhs: Vec<C64> = (0..2 * n)
            .map(|m| {
                let model: C64 = lambda.iter().zip(w.iter()).map(|(l, wj)| wj * (-l).powu(m as u32)).sum();
                C64::new(js[m], 0.0) - model
            })
            .collect();
        let step = solve_least_squares(&jac, &rhs, 0.0).x;
        if step.iter().any(|z| !z.is_finite()) {
            return;
        }
        let new_w: Vec<C64> = (0..n).map(|j| w[j] + step[j]).collect();
        let new_l: Vec<C64> = (0..n).map(|j| lambda[j] + step[n + j]).collect();
        let new_misfit = moment_misfit(&new_l, &new_w, js);
        if !(new_misfit < misfit) {
            return;
        }
        lambda.copy_from_slice(&new_l);
        w.copy_from_slice(&new_w);
        misfit = new_misfit;
    }
}

// Roots of a real polynomial are real or come in conjugate pairs, and the
// matching weights inherit the same structure. Rounding breaks both; restore
// them so that the evaluated model is real.
fn enforce_conjugate_pairs(lambda: &mut [C64], w: &mut [C64]) {
    let n = lambda.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] || lambda[i].im <= 0.0 {
            continue;
        }
        let target = lambda[i].conj();
        let best = (0..n)
            .filter(|&j| j != i && !paired[j] && lambda[j].im < 0.0)
            .min_by(|&a, &b| (lambda[a] - target).norm().total_cmp(&(lambda[b] - target).norm()));
        if let Some(j) = best {
            if (lambda[j] - target).norm() <= PAIRING_TOL * lambda[i].norm().max(1.0) {
                let l = 0.5 * (lambda[i] + lambda[j].conj());
                let a = 0.5 * (w[i] + w[j].conj());
                lambda[i] = l;
                lambda[j] = l.conj();
                w[i] = a;
                w[j] = a.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
    for i in 0..n {
        if !paired[i] {
            lambda[i].im = 0.0;
            w[i].im = 0.0;
        }
    }
}

/// Aperiodic model with n sine and n cosine modes (fewer if the jumps do not
/// support n distinct modes). Jumps are taken on [-pi, pi].
pub fn build_aperiodic_model(jumps: &JumpData, n: usize) -> AperiodicModel {
    build_aperiodic_model_with(jumps, &GfsOptions::new(n))
}

pub fn build_aperiodic_model_with(jumps: &JumpData, opts: &GfsOptions) -> AperiodicModel {
    let q = jumps.q();
    let ns = opts.n_sine.min(q.div_ceil(2) / 2);
    let nc = opts.n_cosine.min((q / 2) / 2);
    let even = Parity::Even.select(&jumps.values, 2 * ns);
    let odd = Parity::Odd.select(&jumps.values, 2 * nc);
    AperiodicModel {
        sine_modes: solve_family(&even, ns, Parity::Even, opts),
        cosine_modes: solve_family(&odd, nc, Parity::Odd, opts),
    }
}

/// u = u_p + u_a on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GfsDecomposition {
    pub grid: GridSpec,
    pub periodic: Vec<f64>,
    pub aperiodic: AperiodicModel,
    pub jumps: JumpData,
}

// Jumps with respect to the standard coordinate on [-pi, pi].
fn standard_jumps(jumps: &JumpData, grid: &GridSpec) -> JumpData {
    let f = 1.0 / grid.chain_factor();
    let values = jumps.values.iter().enumerate().map(|(m, v)| v * f.powi(m as i32)).collect();
    JumpData::new(values, jumps.source)
}

pub fn gfs_decompose(u: &SampledSignal, n: usize, jumps: &JumpData) -> Result<GfsDecomposition, GfsError> {
    gfs_decompose_with(u, jumps, &GfsOptions::new(n))
}

pub fn gfs_decompose_with(
    u: &SampledSignal,
    jumps: &JumpData,
    opts: &GfsOptions,
) -> Result<GfsDecomposition, GfsError> {
    let needed = 4 * opts.n_sine.max(opts.n_cosine);
    if jumps.q() < needed {
        return Err(GfsError::NotEnoughJumps { needed, got: jumps.q() });
    }
    let aperiodic = build_aperiodic_model_with(&standard_jumps(jumps, &u.grid), opts);
    let xs = u.grid.standard_nodes();
    let mut periodic = Vec::with_capacity(xs.len());
    for (x, v) in xs.iter().zip(&u.values) {
        periodic.push(v - evaluate_aperiodic(&aperiodic, *x, 0)?);
    }
    Ok(GfsDecomposition { grid: u.grid, periodic, aperiodic, jumps: jumps.clone() })
}

/// Derivative of order `order` at every node: spectral derivative of the
/// periodic part plus the analytic derivative of the aperiodic part.
pub fn gfs_derivative(dec: &GfsDecomposition, order: u32) -> Result<SampledSignal, GfsError> {
    assert!(order >= 1, "derivative order must be at least 1");
    let n = dec.grid.n;
    let mut dp = periodic_derivative(&dec.periodic[..n], order);
    dp.push(dp[0]);
    let chain = dec.grid.chain_factor().powi(order as i32);
    let xs = dec.grid.standard_nodes();
    let mut values = Vec::with_capacity(n + 1);
    for (x, p) in xs.iter().zip(&dp) {
        values.push(chain * (p + evaluate_aperiodic(&dec.aperiodic, *x, order)?));
    }
    Ok(SampledSignal { grid: dec.grid, values })
}

/// Convenience: sample, take analytic or supplied jumps, return u'.
pub fn gfs_first_derivative(u: &SampledSignal, n: usize, jumps: &JumpData) -> Result<SampledSignal, GfsError> {
    gfs_derivative(&gfs_decompose(u, n, jumps)?, 1)
}

/// Analytic first derivative of a catalog function on the grid nodes.
pub fn exact_derivative(f: &TestFunction, grid: &GridSpec, order: u32) -> Vec<f64> {
    grid.nodes().iter().map(|&x| f.derivative(x, order)).collect()
}
