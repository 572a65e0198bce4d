use nalgebra::{Complex, Schur};
use serde::{Deserialize, Serialize};

use super::generator::MomentGenerator;
use crate::error::{Error, Result};

/// Real parts above this are treated as zero (undamped) modes.
pub const ZERO_MODE_TOL: f64 = 1e-12;

/// Convergence thresholds tried in turn by the Schur iteration.
const SCHUR_TOLERANCES: [f64; 4] = [f64::EPSILON, 1e-14, 1e-13, 1e-12];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for Eigenvalue {
    fn from(z: Complex<f64>) -> Self {
        Eigenvalue { re: z.re, im: z.im }
    }
}

/// Dynamical eigenvalues of the second-moment drift matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted by real part, ascending (most damped first).
    pub mu: Vec<Eigenvalue>,
    /// `Re(least damped) / Re(most damped)` over the damped eigenvalues, in `(0, 1]`.
    pub ratio: Option<f64>,
    /// `|Im mu|` of the slowest-decaying oscillatory eigenvalue.
    pub dominant_frequency: Option<f64>,
    /// Number of eigenvalues with `Re >= -ZERO_MODE_TOL`.
    pub zero_modes: usize,
}

impl Spectrum {
    pub fn sum(&self) -> Complex<f64> {
        self.mu.iter().map(|e| Complex::new(e.re, e.im)).sum()
    }

    pub fn max_real(&self) -> f64 {
        self.mu.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn dynamical_eigenvalues(gen: &MomentGenerator) -> Result<Spectrum> {
    // Exactly repeated eigenvalues (e.g. identical uncoupled oscillators) can
    // stall deflation at machine precision; retry with slightly looser
    // convergence thresholds, which costs at most ~1e-12 relative accuracy.
    let schur = SCHUR_TOLERANCES
        .iter()
        .find_map(|&eps| Schur::try_new(gen.m, eps, 10_000))
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let mut mu: Vec<Eigenvalue> = schur
        .complex_eigenvalues()
        .iter()
        .map(|&z| Eigenvalue::from(z))
        .collect();
    if mu.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    mu.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let damped: Vec<f64> = mu
        .iter()
        .map(|e| e.re)
        .filter(|&re| re < -ZERO_MODE_TOL)
        .collect();
    let zero_modes = mu.len() - damped.len();
    let ratio = match (damped.first(), damped.last()) {
        (Some(&most), Some(&least)) => Some(least / most),
        _ => None,
    };

    let scale = gen.m.abs().max().max(1.0);
    let dominant_frequency = mu
        .iter()
        .filter(|e| e.im.abs() > 1e-9 * scale)
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .map(|e| e.im.abs());

    Ok(Spectrum {
        mu,
        ratio,
        dominant_frequency,
        zero_modes,
    })
}
