use num_complex::Complex64;
use rustfft::FftPlanner;

/// Integer wavenumber of DFT bin `j` for an `n`-point transform, in the range
/// -ceil(n/2)+1 ..= floor(n/2).
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// `order`-th derivative of the trigonometric interpolant through `samples`,
/// taken as one period of a 2pi-periodic function. For even length and odd
/// order the Nyquist bin is zeroed.
pub fn periodic_derivative(samples: &[f64], order: u32) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let k = wavenumber(j, n);
        if n.is_multiple_of(2) && j == n / 2 && order % 2 == 1 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, k as f64).powu(order);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// DFT magnitudes |U_k| / N for bins k = 0..=N/2.
pub fn magnitude_spectrum(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm() / n as f64).collect()
}
