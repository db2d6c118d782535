//! Spectral differentiation of non-periodic functions on a bounded interval.
//!
//! A sampled function `u` is split as `u = u_p + u_a`, where the aperiodic
//! part `u_a` is a handful of non-harmonic sine and cosine modes fitted to the
//! jumps `J_m = u^(m)(b) - u^(m)(a)`, and the periodic remainder `u_p` is
//! differentiated with the FFT without Gibbs oscillations.
//!
//! ```
//! use gfs::{functions::TestFunction, grid::{make_grid, sample}};
//! use gfs::jumps::jumps_from_analytic;
//! use gfs::gfs::{gfs_decompose, gfs_derivative};
//!
//! let f = TestFunction::gaussian();
//! let grid = make_grid(-std::f64::consts::PI, std::f64::consts::PI, 64).unwrap();
//! let u = sample(&f, &grid).unwrap();
//! let dec = gfs_decompose(&u, 3, &jumps_from_analytic(&f, 12)).unwrap();
//! let du = gfs_derivative(&dec, 1).unwrap();
//! let x = grid.x(10);
//! assert!((du.values[10] - f.derivative(x, 1)).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod functions;
pub mod gfs;
pub mod grid;
pub mod jumps;
pub mod numerics;
pub mod spectral;
