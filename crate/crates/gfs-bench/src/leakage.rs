use std::f64::consts::PI;
use std::io::{self, Write};

use gfs::functions::TestFunction;
use gfs::gfs::{gfs_decompose_with, GfsError, GfsOptions};
use gfs::grid::{make_grid, sample};
use gfs::jumps::jumps_from_analytic;
use gfs::numerics::C64;
use gfs::spectral::magnitude_spectrum;

/// Recovered modes and the spectra of u and of its periodic part.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    pub n: usize,
    /// (k, amplitude) of sin(k x) terms.
    pub sine_modes: Vec<(C64, C64)>,
    /// (k, amplitude) of cos(k x) terms.
    pub cosine_modes: Vec<(C64, C64)>,
    /// |U_k| / N, k = 0..=N/2, for the raw samples and for u_p.
    pub raw_spectrum: Vec<f64>,
    pub periodic_spectrum: Vec<f64>,
}

impl LeakageReport {
    /// Tab-separated spectra, then the recovered modes as comment lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k\traw\tperiodic")?;
        for (k, (raw, per)) in self.raw_spectrum.iter().zip(&self.periodic_spectrum).enumerate() {
            writeln!(out, "{k}\t{raw:.6e}\t{per:.6e}")?;
        }
        for (family, modes) in [("sin", &self.sine_modes), ("cos", &self.cosine_modes)] {
            for (k, a) in modes {
                writeln!(out, "# {family} k={:.12} amplitude={:.12}", k.re, a.re)?;
            }
        }
        out.flush()
    }
}

/// GFS with two sine and two cosine modes on 0.7 sin(5.3x) + sin(12.4x).
pub fn leakage_demo(n: usize) -> Result<LeakageReport, GfsError> {
    leakage_demo_for(&TestFunction::leakage_demo(), n)
}

pub fn leakage_demo_for(f: &TestFunction, n: usize) -> Result<LeakageReport, GfsError> {
    assert!(n >= 64, "the leakage demo needs N >= 64");
    let grid = make_grid(-PI, PI, n).expect("valid grid");
    let u = sample(f, &grid).expect("finite samples");
    let opts = GfsOptions::new(2);
    let dec = gfs_decompose_with(&u, &jumps_from_analytic(f, 8), &opts)?;
    Ok(LeakageReport {
        n,
        sine_modes: dec.aperiodic.sine_amplitudes(),
        cosine_modes: dec.aperiodic.cosine_amplitudes(),
        raw_spectrum: magnitude_spectrum(&u.values[..n]),
        periodic_spectrum: magnitude_spectrum(&dec.periodic[..n]),
    })
}
