//! Dense complex linear algebra and polynomial roots.
//!
//! Every system solved here is small (at most a few dozen unknowns for the
//! GFS solver, a few hundred for Prony), so the routines favour robustness
//! over speed: SVD-based least squares, companion-matrix roots with
//! balancing and Newton polishing.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Singular values below `DEFAULT_RANK_TOL * max(rows, cols) * sigma_max` are
/// discarded when no explicit tolerance is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-13;

/// Relative distance below which two Vandermonde nodes are treated as equal.
pub const NODE_COINCIDENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("nodes {i} and {j} coincide within relative {NODE_COINCIDENCE_TOL:e}")]
    DegenerateNodes { i: usize, j: usize },
    #[error("eigenvalue iteration did not converge for a degree {degree} polynomial")]
    NoConvergence { degree: usize },
    #[error("matrix is exactly singular")]
    Singular,
}

/// Row-major dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, NumericsError> {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        if let Some(idx) = entries.iter().position(|z| !z.is_finite()) {
            return Err(NumericsError::NonFinite { row: idx / cols, col: idx % cols });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Result<Self, NumericsError> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .expect("identity is finite")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }
}

/// Monic-normalised polynomial c_0 + c_1 λ + ... + c_n λ^n.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCoeffs {
    coefficients: Vec<C64>,
}

impl PolynomialCoeffs {
    /// Coefficients in ascending powers. Exact zeros at the top are trimmed and
    /// the result is scaled so that the leading coefficient is one.
    pub fn new(mut coefficients: Vec<C64>) -> Self {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == C64::new(0.0, 0.0) {
            coefficients.pop();
        }
        let lead = *coefficients.last().expect("polynomial needs at least one coefficient");
        assert!(lead != C64::new(0.0, 0.0), "zero polynomial has no leading coefficient");
        for c in &mut coefficients {
            *c /= lead;
        }
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    fn eval_with_derivative(&self, x: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }
}

/// Minimum-norm least-squares solution together with the numerical rank and
/// the full singular spectrum (descending).
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: Vec<C64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl LeastSquares {
    /// sigma_max / sigma_min over the full spectrum; infinite for singular input.
    pub fn condition_estimate(&self) -> f64 {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        let min = self.singular_values.last().copied().unwrap_or(0.0);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// `x = A^+ b` through the SVD. Singular values below `rank_tol * sigma_max`
/// are treated as zero; `rank_tol == 0` selects `max(rows, cols) * 1e-13`.
pub fn solve_least_squares(a: &ComplexMatrix, b: &[C64], rank_tol: f64) -> LeastSquares {
    assert_eq!(a.rows, b.len(), "right-hand side length must equal row count");
    assert!(rank_tol >= 0.0);
    let tol = if rank_tol == 0.0 {
        DEFAULT_RANK_TOL * a.rows.max(a.cols) as f64
    } else {
        rank_tol
    };
    let svd = a.to_dmatrix().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);

    let bv = DVector::from_column_slice(b);
    let mut x = DVector::<C64>::zeros(a.cols);
    let mut rank = 0;
    if sigma_max > 0.0 {
        for &i in &order {
            let s = svd.singular_values[i];
            if s <= tol * sigma_max {
                continue;
            }
            rank += 1;
            let coeff = u.column(i).dotc(&bv) / s;
            x += v_t.row(i).adjoint() * coeff;
        }
    }
    LeastSquares { x: x.iter().copied().collect(), rank, singular_values }
}

/// All roots of `p`, with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, then at most a few Newton
/// steps per root, each kept only if it lowers the residual.
pub fn polynomial_roots(p: &PolynomialCoeffs) -> Result<Vec<C64>, NumericsError> {
    let n = p.degree();
    assert!(n >= 1, "polynomial_roots needs degree >= 1");
    let c = p.coefficients();
    if n == 1 {
        return Ok(vec![-c[0]]);
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i];
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 1000 * n)
        .ok_or(NumericsError::NoConvergence { degree: n })?;
    let (_, t) = schur.unpack();
    let mut roots: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    for r in &mut roots {
        polish(p, r);
    }
    if roots.iter().any(|r| !r.is_finite()) {
        return Err(NumericsError::NoConvergence { degree: n });
    }
    Ok(roots)
}

fn polish(p: &PolynomialCoeffs, root: &mut C64) {
    let (mut val, mut der) = p.eval_with_derivative(*root);
    for _ in 0..3 {
        if der == C64::new(0.0, 0.0) || val == C64::new(0.0, 0.0) {
            return;
        }
        let candidate = *root - val / der;
        let (cv, cd) = p.eval_with_derivative(candidate);
        if !(cv.norm() < val.norm()) {
            return;
        }
        *root = candidate;
        val = cv;
        der = cd;
    }
}

// Parlett-Reinsch diagonal similarity balancing (radix 2, so exact).
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut g = row / radix;
            let mut f = 1.0;
            let s = col + row;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Solves `V w = rhs` with `V[i][j] = nodes[j]^i`.
pub fn solve_transposed_vandermonde(nodes: &[C64], rhs: &[C64]) -> Result<Vec<C64>, NumericsError> {
    let n = nodes.len();
    assert_eq!(n, rhs.len(), "nodes and rhs must have equal length");
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let sep = (nodes[i] - nodes[j]).norm() / nodes[i].norm().max(nodes[j].norm()).max(1.0);
            if sep < NODE_COINCIDENCE_TOL {
                return Err(NumericsError::DegenerateNodes { i, j });
            }
            min_sep = min_sep.min(sep);
        }
    }
    let v = ComplexMatrix::from_fn(n, n, |i, j| nodes[j].powu(i as u32))?;
    if min_sep > 1e-4 {
        let lu = v.to_dmatrix().lu();
        if let Some(w) = lu.solve(&DVector::from_column_slice(rhs)) {
            if w.iter().all(|z| z.is_finite()) {
                return Ok(w.iter().copied().collect());
            }
        }
    }
    Ok(solve_least_squares(&v, rhs, f64::EPSILON * n as f64).x)
}

/// Direct solve of a square system by LU with partial pivoting. No
/// regularization: a nearly singular matrix gives a large, honest answer.
pub fn solve_square(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>, NumericsError> {
    assert_eq!(a.rows(), a.cols(), "matrix must be square");
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let x = a.to_dmatrix().lu().solve(&DVector::from_column_slice(b)).ok_or(NumericsError::Singular)?;
    Ok(x.iter().copied().collect())
}

/// Square root on the principal branch, taking the argument in (-pi, pi], so
/// the negative real axis maps to the positive imaginary axis.
pub fn complex_principal_sqrt(z: C64) -> C64 {
    if z.im == 0.0 && z.re < 0.0 {
        return C64::new(0.0, (-z.re).sqrt());
    }
    z.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn sorted_by_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn identity_least_squares() {
        let a = ComplexMatrix::identity(2);
        let sol = solve_least_squares(&a, &[c(3.0, 0.0), c(0.0, 4.0)], 0.0);
        assert_eq!(sol.rank, 2);
        assert!((sol.x[0] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((sol.x[1] - c(0.0, 4.0)).norm() < 1e-15);
    }

    #[test]
    fn rank_one_minimum_norm() {
        let a = ComplexMatrix::new(2, 2, real(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        let sol = solve_least_squares(&a, &real(&[2.0, 2.0]), 0.0);
        assert_eq!(sol.rank, 1);
        // A^H A x = A^H b and x in the row space: x = (1, 1).
        for xi in &sol.x {
            assert!((xi - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let a = ComplexMatrix::new(2, 3, vec![c(0.0, 0.0); 6]).unwrap();
        let sol = solve_least_squares(&a, &real(&[1.0, 2.0]), 0.0);
        assert_eq!(sol.rank, 0);
        assert!(sol.x.iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(sol.x.len(), 3);
    }

    #[test]
    fn two_mode_hankel_gives_vieta_values() {
        // u = sin(k1 x) + sin(k2 x); even jumps J_2m = (-1)^m 2 k^2m sin(k pi).
        let ks = [0.5_f64, 1.2];
        let jump = |m: i32| -> f64 {
            ks.iter()
                .map(|k| (-1f64).powi(m) * 2.0 * k.powi(2 * m) * (k * std::f64::consts::PI).sin())
                .sum()
        };
        let (j0, j2, j4, j6) = (jump(0), jump(1), jump(2), jump(3));
        let a = ComplexMatrix::new(2, 2, real(&[j0, j2, j2, j4])).unwrap();
        let sol = solve_least_squares(&a, &real(&[-j4, -j6]), 0.0);
        assert!((sol.x[0] - c(0.36, 0.0)).norm() < 1e-12, "{:?}", sol.x);
        assert!((sol.x[1] - c(1.69, 0.0)).norm() < 1e-12, "{:?}", sol.x);
    }

    #[test]
    #[should_panic]
    fn dimension_mismatch_panics() {
        let a = ComplexMatrix::identity(2);
        solve_least_squares(&a, &real(&[1.0]), 0.0);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let err = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, NumericsError::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn linear_root() {
        let p = PolynomialCoeffs::new(real(&[-1.0, 1.0]));
        let r = polynomial_roots(&p).unwrap();
        assert_eq!(r, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn quadratic_roots() {
        let p = PolynomialCoeffs::new(real(&[0.36, -1.69, 1.0]));
        let r = sorted_by_re(polynomial_roots(&p).unwrap());
        assert!((r[0] - c(0.25, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.44, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugate_roots() {
        let p = PolynomialCoeffs::new(real(&[1.0, 0.0, 1.0]));
        let mut r = polynomial_roots(&p).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn leading_zeros_trimmed() {
        let p = PolynomialCoeffs::new(vec![c(2.0, 0.0), c(4.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coefficients()[1], c(1.0, 0.0));
    }

    #[test]
    #[should_panic]
    fn degree_zero_panics() {
        let _ = polynomial_roots(&PolynomialCoeffs::new(real(&[3.0])));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(solve_transposed_vandermonde(&[c(1.0, 0.0)], &[c(5.0, 0.0)]).unwrap(), vec![c(5.0, 0.0)]);

        let pi = std::f64::consts::PI;
        let ks = [0.5_f64, 1.2];
        let nodes: Vec<C64> = ks.iter().map(|k| c(-k * k, 0.0)).collect();
        let j0: f64 = ks.iter().map(|k| 2.0 * (k * pi).sin()).sum();
        let j2: f64 = ks.iter().map(|k| -2.0 * k * k * (k * pi).sin()).sum();
        let w = solve_transposed_vandermonde(&nodes, &real(&[j0, j2])).unwrap();
        for (wi, k) in w.iter().zip(ks) {
            assert!((wi - c(2.0 * (k * pi).sin(), 0.0)).norm() < 1e-13);
        }

        let err = solve_transposed_vandermonde(&[c(-0.25, 0.0), c(-0.25, 0.0)], &real(&[1.0, 1.0]));
        assert_eq!(err, Err(NumericsError::DegenerateNodes { i: 0, j: 1 }));
    }

    #[test]
    fn square_solve() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c([[2.0, 1.0], [1.0, 3.0]][i][j], 0.0)).unwrap();
        let x = solve_square(&a, &real(&[3.0, 5.0])).unwrap();
        assert!((x[0] - c(0.8, 0.0)).norm() < 1e-15 && (x[1] - c(1.4, 0.0)).norm() < 1e-15);
        let z = ComplexMatrix::from_fn(2, 2, |_, _| c(0.0, 0.0)).unwrap();
        assert_eq!(solve_square(&z, &real(&[1.0, 1.0])), Err(NumericsError::Singular));
    }

    #[test]
    fn principal_sqrt_examples() {
        assert_eq!(complex_principal_sqrt(c(4.0, 0.0)), c(2.0, 0.0));
        assert_eq!(complex_principal_sqrt(c(-1.0, 0.0)), c(0.0, 1.0));
        assert_eq!(complex_principal_sqrt(c(-1.0, -0.0)), c(0.0, 1.0));
        assert!((complex_principal_sqrt(c(0.0, 2.0)) - c(1.0, 1.0)).norm() < 1e-15);
    }
}
