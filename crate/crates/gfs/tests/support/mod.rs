//! Independent oracles and input generators shared by the property tests and
//! the acceptance suite. Nothing here calls the solver internals it checks.
#![allow(dead_code)]

use std::f64::consts::PI;

use gfs::baselines::{bernoulli_polynomial, eckhoff_singular_part, prony_fit, roache_coefficients, BernoulliBasis};
use gfs::functions::{Term, TestFunction};
use gfs::gfs::{
    build_aperiodic_model, build_aperiodic_model_with, evaluate_aperiodic, gfs_decompose_with, gfs_derivative,
    modes_from_symmetric, solve_elementary_symmetric, solve_mode_amplitudes, GfsOptions, Parity,
};
use gfs::grid::{make_grid, sample, SampledSignal};
use gfs::jumps::{fd_weights, jumps_from_analytic, JumpData, Side, REGULARIZED_ZERO};
use gfs::numerics::{solve_least_squares, ComplexMatrix, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

// ---------------------------------------------------------------- generators

/// Well-separated non-integer wavenumbers below `max_k`.
pub fn wavenumbers(count: usize, max_k: u32) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(0..max_k, count).prop_flat_map(move |ints| {
        let ints: Vec<u32> = ints.into_iter().collect();
        prop::collection::vec(0.15f64..0.85, ints.len())
            .prop_map(move |fr| ints.iter().zip(fr).map(|(&i, f)| i as f64 + f).collect::<Vec<f64>>())
    })
}

fn amplitudes(count: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![-2.0f64..-0.3, 0.3f64..2.0], count)
}

/// Sum of `ns` sines and `nc` cosines with distinct non-integer wavenumbers.
pub fn sinusoid_sum(ns: usize, nc: usize, max_k: u32) -> impl Strategy<Value = TestFunction> {
    (wavenumbers(ns, max_k), wavenumbers(nc, max_k), amplitudes(ns), amplitudes(nc)).prop_map(|(ks, kc, a, b)| {
        TestFunction::Sinusoids {
            sines: ks.iter().zip(&a).map(|(&k, &amplitude)| Term { amplitude, k }).collect(),
            cosines: kc.iter().zip(&b).map(|(&k, &amplitude)| Term { amplitude, k }).collect(),
        }
    })
}

/// Gaussians, modulated sines and sinusoid sums with random parameters.
pub fn smooth_input() -> impl Strategy<Value = TestFunction> {
    prop_oneof![
        (-PI..PI, 0.7f64..2.0).prop_map(|(x0, w)| TestFunction::Gaussian { x0, w }),
        (-0.6f64..0.3, 0.3f64..1.4).prop_map(|(a, b)| TestFunction::ModulatedSine { a, b }),
        sinusoid_sum(2, 2, 5),
    ]
}

/// Trigonometric polynomial with integer modes below `max_k`.
pub fn trig_poly(max_k: u32) -> impl Strategy<Value = TestFunction> {
    prop::collection::vec((1..max_k, -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|terms| {
        let terms: Vec<(u32, f64, f64)> = terms;
        TestFunction::trig_poly(&terms)
    })
}

// ------------------------------------------------------------------- helpers

pub fn grid(n: usize) -> gfs::grid::GridSpec {
    make_grid(-PI, PI, n).unwrap()
}

pub fn rel_close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
}

fn nearest(target: C64, pool: &[C64]) -> &C64 {
    pool.iter()
        .min_by(|a, b| (**a - target).norm().total_cmp(&(**b - target).norm()))
        .unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

// --------------------------------------------------------- jump matching

/// The model's jumps, computed by evaluating its derivatives at both ends,
/// reproduce the input jumps J_0..J_{4n-1}.
pub fn check_jump_matching(f: &TestFunction, n: usize) -> Result<(), String> {
    let jumps = jumps_from_analytic(f, 4 * n);
    let model = build_aperiodic_model(&jumps, n);
    for m in 0..4 * n {
        let right = evaluate_aperiodic(&model, PI, m as u32).map_err(|e| e.to_string())?;
        let left = evaluate_aperiodic(&model, -PI, m as u32).map_err(|e| e.to_string())?;
        let got = right - left;
        let want = jumps.values[m];
        let ok = if want.abs() <= REGULARIZED_ZERO {
            got.abs() <= 1e-10
        } else {
            (got - want).abs() <= 1e-8 * want.abs()
        };
        if !ok {
            return Err(format!("{f:?} n={n}: J_{m} model {got:e} vs input {want:e}"));
        }
    }
    Ok(())
}

// ------------------------------------------------------ closed-form oracles

/// Closed-form (e_1..e_n), squared wavenumbers and amplitudes for one family.
pub struct FamilyOracle {
    pub e: Vec<C64>,
    pub k2: Vec<C64>,
    pub amplitudes: Vec<C64>,
}

fn amplitude(k2: C64, w: C64, parity: Parity) -> C64 {
    let k = k2.sqrt();
    match parity {
        Parity::Even => w / (2.0 * (k * PI).sin()),
        Parity::Odd => -w / (2.0 * k * (k * PI).sin()),
    }
}

/// n = 1: k^2 = -J_2/J_0 (or -J_3/J_1), u = J_0 / (2 sin k pi) or -J_1 / (2 k sin k pi).
pub fn oracle_n1(j: &[f64], parity: Parity) -> FamilyOracle {
    let (a, b) = match parity {
        Parity::Even => (j[0], j[2]),
        Parity::Odd => (j[1], j[3]),
    };
    let k2 = C64::new(-b / a, 0.0);
    FamilyOracle { e: vec![k2], k2: vec![k2], amplitudes: vec![amplitude(k2, C64::new(a, 0.0), parity)] }
}

/// n = 2: e_1 = (J0 J6 - J2 J4)/(J2^2 - J0 J4), e_2 = (J4^2 - J2 J6)/(J2^2 - J0 J4)
/// on the jumps of one parity, quadratic formula for k^2, and
/// u_1 = (k_2^2 J0 + J2) / (2 (k_2^2 - k_1^2) sin k_1 pi) (sine family).
pub fn oracle_n2(j: &[f64], parity: Parity) -> FamilyOracle {
    let o = if parity == Parity::Even { 0 } else { 1 };
    let (j0, j2, j4, j6) = (j[o], j[o + 2], j[o + 4], j[o + 6]);
    let den = j2 * j2 - j0 * j4;
    let e1 = C64::new((j0 * j6 - j2 * j4) / den, 0.0);
    let e2 = C64::new((j4 * j4 - j2 * j6) / den, 0.0);
    let disc = (e1 * e1 - 4.0 * e2).sqrt();
    let k2 = vec![(e1 + disc) / 2.0, (e1 - disc) / 2.0];
    let w = |a: usize, b: usize| (k2[b] * j0 + j2) / (k2[b] - k2[a]);
    let amplitudes = vec![amplitude(k2[0], w(0, 1), parity), amplitude(k2[1], w(1, 0), parity)];
    FamilyOracle { e: vec![e1, e2], k2, amplitudes }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// n = 3: Cramer's rule on the 3x3 jump Hankel system, Cardano for the
/// cubic, and Lagrange-form amplitudes
/// w_j = (J4 + (l_a + l_b) J2 + l_a l_b J0) / ((l_a - l_j)(l_b - l_j)).
pub fn oracle_n3(j: &[f64], parity: Parity) -> FamilyOracle {
    let o = if parity == Parity::Even { 0 } else { 1 };
    let jp: Vec<f64> = (0..6).map(|i| j[o + 2 * i]).collect();
    let h = [[jp[0], jp[1], jp[2]], [jp[1], jp[2], jp[3]], [jp[2], jp[3], jp[4]]];
    let rhs = [-jp[3], -jp[4], -jp[5]];
    let d = det3(h);
    let col = |c: usize| {
        let mut m = h;
        for r in 0..3 {
            m[r][c] = rhs[r];
        }
        det3(m) / d
    };
    // Unknown vector is (e_3, e_2, e_1).
    let (e3, e2, e1) = (C64::new(col(0), 0.0), C64::new(col(1), 0.0), C64::new(col(2), 0.0));
    let k2 = cardano(e1, e2, e3);
    let amplitudes = (0..3)
        .map(|i| {
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let w = (jp[2] + (k2[a] + k2[b]) * jp[1] + k2[a] * k2[b] * jp[0]) / ((k2[a] - k2[i]) * (k2[b] - k2[i]));
            amplitude(k2[i], w, parity)
        })
        .collect();
    FamilyOracle { e: vec![e1, e2, e3], k2, amplitudes }
}

/// Roots of t^3 - e1 t^2 + e2 t - e3.
pub fn cardano(e1: C64, e2: C64, e3: C64) -> Vec<C64> {
    let p = e2 - e1 * e1 / 3.0;
    let q = -2.0 * e1 * e1 * e1 / 27.0 + e1 * e2 / 3.0 - e3;
    let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut c = (-q / 2.0 + s).powf(1.0 / 3.0);
    if c.norm() < 1e-300 {
        c = (-q / 2.0 - s).powf(1.0 / 3.0);
    }
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
    (0..3)
        .map(|i| {
            let ci = c * omega.powu(i);
            let y = if ci.norm() < 1e-300 { C64::new(0.0, 0.0) } else { ci - p / (3.0 * ci) };
            y + e1 / 3.0
        })
        .collect()
}

/// The general pipeline agrees with the closed forms for n = 1, 2, 3.
pub fn check_appendix(f: &TestFunction, n: usize) -> Result<(), String> {
    let jumps = jumps_from_analytic(f, 4 * n);
    for parity in [Parity::Even, Parity::Odd] {
        let oracle = match n {
            1 => oracle_n1(&jumps.values, parity),
            2 => oracle_n2(&jumps.values, parity),
            3 => oracle_n3(&jumps.values, parity),
            _ => unreachable!(),
        };
        let (e_desc, _) = solve_elementary_symmetric(&jumps, parity, n).map_err(|e| e.to_string())?;
        let e: Vec<C64> = e_desc.iter().rev().copied().collect();
        for (i, (a, b)) in e.iter().zip(&oracle.e).enumerate() {
            if !rel_close(*a, *b, 1e-9) {
                return Err(format!("{parity:?} n={n}: e_{} {a} vs oracle {b}", i + 1));
            }
        }
        let modes = modes_from_symmetric(&e).map_err(|e| e.to_string())?;
        let k2: Vec<C64> = modes.iter().map(|k| k * k).collect();
        let amps = solve_mode_amplitudes(&modes, &jumps, parity).map_err(|e| e.to_string())?;
        for (k2o, ao) in oracle.k2.iter().zip(&oracle.amplitudes) {
            let idx = k2.iter().position(|v| v == nearest(*k2o, &k2)).unwrap();
            if !rel_close(k2[idx], *k2o, 1e-9) {
                return Err(format!("{parity:?} n={n}: k^2 {} vs oracle {k2o}", k2[idx]));
            }
            if !rel_close(amps[idx], *ao, 1e-9) {
                return Err(format!("{parity:?} n={n}: amplitude {} vs oracle {ao}", amps[idx]));
            }
        }
    }
    Ok(())
}

/// Per-mode identity (es3.x) for n = 3 sine modes:
/// J0 k1^6 k2^2 k3^2 + (k2^2 + k3^2)(J2 k1^6 + J8) + J4 k1^6 + J6 k2^2 k3^2 + J10 = 0.
pub fn three_mode_identity_residual(j: &[f64], k2: &[C64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        let (a, b) = (k2[(i + 1) % 3], k2[(i + 2) % 3]);
        let k6 = k2[i] * k2[i] * k2[i];
        let terms = [j[0] * k6 * a * b, (a + b) * (j[2] * k6 + j[8]), j[4] * k6, j[6] * a * b, C64::new(j[10], 0.0)];
        let sum: C64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.norm()).sum();
        worst = worst.max(sum.norm() / scale);
    }
    worst
}

// ------------------------------------------------------- exact recovery

/// First-order sensitivity of one family's modes to a relative perturbation
/// of size eps in each jump: for every term, (|dk|, |dlambda| / |lambda|).
/// Derived from the Jacobian of sum_j w_j (-lambda_j)^m = J_m at the exact
/// modes; bounds what any double-precision solver can achieve.
pub fn family_sensitivity(terms: &[Term], parity: Parity) -> Vec<(f64, f64)> {
    let n = terms.len();
    if n == 0 {
        return Vec::new();
    }
    let offset = if parity == Parity::Even { 0 } else { 1 };
    let single = |t: &Term, m: usize| {
        let f = if parity == Parity::Even {
            TestFunction::Sinusoids { sines: vec![*t], cosines: vec![] }
        } else {
            TestFunction::Sinusoids { sines: vec![], cosines: vec![*t] }
        };
        f.analytic_jump((offset + 2 * m) as u32)
    };
    let lambda: Vec<f64> = terms.iter().map(|t| t.k * t.k).collect();
    let w: Vec<f64> = terms.iter().map(|t| single(t, 0)).collect();
    let jp: Vec<f64> = (0..2 * n).map(|m| terms.iter().map(|t| single(t, m)).sum()).collect();
    let jac = ComplexMatrix::from_fn(2 * n, 2 * n, |m, c| {
        let j = c % n;
        let v = if c < n {
            (-lambda[j]).powi(m as i32)
        } else if m == 0 {
            0.0
        } else {
            -w[j] * m as f64 * (-lambda[j]).powi(m as i32 - 1)
        };
        C64::new(v, 0.0)
    })
    .unwrap();
    let mut sens = vec![0.0; n];
    for m in 0..2 * n {
        let mut e = vec![C64::new(0.0, 0.0); 2 * n];
        e[m] = C64::new(1.0, 0.0);
        let col = solve_least_squares(&jac, &e, f64::MIN_POSITIVE).x;
        for j in 0..n {
            sens[j] += (col[n + j] * jp[m]).norm() * f64::EPSILON;
        }
    }
    terms
        .iter()
        .zip(&sens)
        .zip(&lambda)
        .map(|((t, s), l)| (s / (2.0 * t.k), s / l))
        .collect()
}

/// Largest mode error double precision forces on exact recovery of `f`.
pub fn recovery_floor(f: &TestFunction) -> f64 {
    let TestFunction::Sinusoids { sines, cosines } = f else { unreachable!() };
    family_sensitivity(sines, Parity::Even)
        .into_iter()
        .chain(family_sensitivity(cosines, Parity::Odd))
        .map(|(dk, _)| dk)
        .fold(0.0, f64::max)
}

/// Largest relative error in lambda = k^2 forced by rounding of the jumps.
pub fn relative_lambda_floor(f: &TestFunction) -> f64 {
    let TestFunction::Sinusoids { sines, cosines } = f else { unreachable!() };
    family_sensitivity(sines, Parity::Even)
        .into_iter()
        .chain(family_sensitivity(cosines, Parity::Odd))
        .map(|(_, r)| r)
        .fold(0.0, f64::max)
}

pub fn check_exact_recovery(f: &TestFunction, n_grid: usize) -> Result<(), String> {
    let TestFunction::Sinusoids { sines, cosines } = f else { unreachable!() };
    let (ns, nc) = (sines.len(), cosines.len());
    let q = 4 * ns.max(nc).max(1);
    let jumps = jumps_from_analytic(f, q);
    let opts = GfsOptions { n_sine: ns, n_cosine: nc, ..GfsOptions::new(0) };
    let model = build_aperiodic_model_with(&jumps, &opts);
    for (terms, got) in [(sines, model.sine_amplitudes()), (cosines, model.cosine_amplitudes())] {
        if got.len() != terms.len() {
            return Err(format!("expected {} modes, got {:?}", terms.len(), got));
        }
        for t in terms.iter() {
            let (k, a) = got
                .iter()
                .min_by(|x, y| (x.0.re - t.k).abs().total_cmp(&(y.0.re - t.k).abs()))
                .unwrap();
            if (k - C64::new(t.k, 0.0)).norm() > 1e-8 || (a - C64::new(t.amplitude, 0.0)).norm() > 1e-8 {
                return Err(format!("term {t:?} recovered as k={k}, a={a}"));
            }
        }
    }
    let u = sample(f, &grid(n_grid)).unwrap();
    let dec = gfs_decompose_with(&u, &jumps, &opts).map_err(|e| e.to_string())?;
    let umax = u.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let pmax = dec.periodic.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if pmax > 1e-8 * umax {
        return Err(format!("periodic remainder {pmax:e} for max|u| {umax:e}"));
    }
    Ok(())
}

// ------------------------------------------------------- periodic fallback

pub fn check_periodic_fallback(f: &TestFunction, n_grid: usize, n: usize) -> Result<(), String> {
    let u = sample(f, &grid(n_grid)).unwrap();
    let jumps = jumps_from_analytic(f, 4 * n);
    let dec = gfs_decompose_with(&u, &jumps, &GfsOptions::new(n)).map_err(|e| e.to_string())?;
    let g = gfs_derivative(&dec, 1).map_err(|e| e.to_string())?;
    let fft = gfs::baselines::fft_derivative(&u, 1);
    for (a, b) in g.values.iter().zip(&fft.values) {
        if (a - b).abs() > 1e-10 {
            return Err(format!("GFS {a} vs FFT {b}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------- FD exactness

/// Sum_m a_m m^n = n! delta_{n,d} for n = 0..width-1, in exact arithmetic
/// (backward side uses offsets -m).
pub fn check_stencil_exactness(d: usize, width: usize, side: Side) -> bool {
    let st = fd_weights(d, width, side);
    let sign: i64 = if side == Side::Forward { 1 } else { -1 };
    for n in 0..width {
        let mut s = BigRational::zero();
        for (m, a) in st.weights.iter().enumerate() {
            s += a * BigRational::from_integer(BigInt::from(sign * m as i64).pow(n as u32));
        }
        let mut fact = BigInt::one();
        for k in 1..=n {
            fact *= BigInt::from(k);
        }
        let want = if n == d { BigRational::from_integer(fact) } else { BigRational::zero() };
        if s != want {
            return false;
        }
    }
    true
}

// ----------------------------------------------------------- Prony recovery

/// h(x) = sum of three real exponentials sampled on [0, 1]; a 3-term fit
/// reproduces its 2M defining samples.
pub fn check_prony_recovery(phi: [f64; 3], c: [f64; 3]) -> Result<(), String> {
    let g = make_grid(0.0, 1.0, 16).unwrap();
    let h = |x: f64| -> f64 { (0..3).map(|j| c[j] * (phi[j] * x).exp()).sum() };
    let values: Vec<f64> = g.nodes().iter().map(|&x| h(x)).collect();
    let u = SampledSignal::new(g, values.clone()).map_err(|e| e.to_string())?;
    let m = 3;
    let fit = prony_fit(&u, m).map_err(|e| e.to_string())?;
    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    for (i, x) in g.nodes().iter().enumerate().take(2 * m) {
        if (fit.value(*x) - values[i]).abs() > 1e-8 * scale {
            return Err(format!("sample {i}: {} vs {}", fit.value(*x), values[i]));
        }
    }
    Ok(())
}

// ------------------------------------------------- Roache / Eckhoff jumps

/// g^(m)(pi) - g^(m)(-pi) from the Roache coefficients equals J_m.
pub fn check_roache_jumps(jumps: &[f64], q: usize) -> Result<(), String> {
    let a = roache_coefficients(jumps, q);
    for m in 0..q {
        let deriv = |x: f64| -> f64 {
            (m..a.len()).map(|k| a[k] * factorial(k) / factorial(k - m) * x.powi((k - m) as i32)).sum()
        };
        let got = deriv(PI) - deriv(-PI);
        if (got - jumps[m]).abs() > 1e-9 * jumps[m].abs().max(1e-300) {
            return Err(format!("q={q}: Roache J_{m} {got:e} vs {:e}", jumps[m]));
        }
    }
    Ok(())
}

/// s^(m) jumps through the V-chain: s^(m) = sum_{n>=m} A^n V_{n-m} plus a
/// constant, and V_p jumps by -(2pi)^p/(p+1)! (B_{p+1}(1) - B_{p+1}(0)).
pub fn check_eckhoff_jumps(jumps: &[f64], q: usize) -> Result<(), String> {
    let basis = BernoulliBasis::standard();
    let v_jump = |p: usize| {
        -(2.0 * PI).powi(p as i32) / factorial(p + 1)
            * (bernoulli_polynomial(basis, p + 1, 1.0) - bernoulli_polynomial(basis, p + 1, 0.0))
    };
    for m in 0..q {
        let got: f64 = (m..q).map(|n| -jumps[n] * v_jump(n - m)).sum();
        // Rounding in B_{p+1}(1) - B_{p+1}(0) is relative to the coefficient size.
        let scale: f64 = (m..q).map(|n| jumps[n].abs() * (2.0 * PI).powi((n - m) as i32) / factorial(n - m + 1)).sum();
        if (got - jumps[m]).abs() > 1e-9 * scale.max(1e-300) {
            return Err(format!("q={q}: Eckhoff J_{m} {got:e} vs {:e}", jumps[m]));
        }
    }
    // The sampled singular part carries the zeroth jump across the seam.
    let u = sample(&TestFunction::gaussian(), &grid(32)).unwrap();
    let data = JumpData::new(jumps.to_vec(), gfs::jumps::JumpSource::Analytic);
    let (s, _) = eckhoff_singular_part(&u, &data, q);
    if (s[32] - s[0] - jumps[0]).abs() > 1e-9 * jumps[0].abs().max(1.0) {
        return Err(format!("q={q}: sampled seam jump {} vs {}", s[32] - s[0], jumps[0]));
    }
    Ok(())
}
