use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4, SVD};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::covariance::CovarianceMatrix;
use crate::error::{Error, Result};

/// Symplectic eigenvalues below `1 - PHYSICALITY_TOL` are rejected; those in
/// `[1 - PHYSICALITY_TOL, 1)` are clamped to 1.
pub const PHYSICALITY_TOL: f64 = 1e-6;

/// Values of `B - 1` at or below this count as a pure measured mode.
const PURE_TOL: f64 = 1e-12;

/// Determinants of the blocks of `sigma = [[A, C], [C^T, B]]` plus `det sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockInvariants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BlockInvariants {
    pub fn of(cov: &CovarianceMatrix) -> Self {
        let s = &cov.sigma;
        let a: Matrix2<f64> = s.fixed_view::<2, 2>(0, 0).into_owned();
        let b: Matrix2<f64> = s.fixed_view::<2, 2>(2, 2).into_owned();
        let c: Matrix2<f64> = s.fixed_view::<2, 2>(0, 2).into_owned();
        BlockInvariants {
            a: a.determinant(),
            b: b.determinant(),
            c: c.determinant(),
            d: s.determinant(),
        }
    }

    /// Invariants with the two oscillators exchanged.
    pub fn swapped(&self) -> Self {
        BlockInvariants {
            a: self.b,
            b: self.a,
            ..*self
        }
    }
}

/// Global and reduced symplectic eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    /// Global eigenvalues, `nu_minus <= nu_plus`.
    pub nu_minus: f64,
    pub nu_plus: f64,
    /// `sqrt(det A)` and `sqrt(det B)`.
    pub nu_a: f64,
    pub nu_b: f64,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.nu_minus.min(self.nu_a).min(self.nu_b)
    }
}

/// Symplectic form over `(q1, p1, q2, p2)`.
fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Global symplectic eigenvalues `(nu_minus, nu_plus)` of `sigma`.
///
/// They are the moduli of the eigenvalues of `i Omega sigma`, obtained here
/// as the singular values of the antisymmetric matrix
/// `sigma^(1/2) Omega sigma^(1/2)`, which stays accurate for nearly pure
/// states where the quadratic-formula route loses half the digits.
fn williamson_pair(sigma: &Matrix4<f64>) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::try_new(*sigma, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("covariance eigensolver did not converge".into()))?;
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let half = eig.eigenvectors * Matrix4::from_diagonal(&root) * eig.eigenvectors.transpose();
    let k = half * symplectic_form() * half;
    let svd = SVD::try_new(k, false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symplectic eigensolver did not converge".into()))?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    if sv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite symplectic eigenvalue".into()));
    }
    sv.sort_by(f64::total_cmp);
    Ok((0.5 * (sv[0] + sv[1]), 0.5 * (sv[2] + sv[3])))
}

pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let inv = BlockInvariants::of(cov);
    let (nu_minus, nu_plus) = williamson_pair(&cov.sigma)?;
    Ok(SymplecticSpectrum {
        nu_minus,
        nu_plus,
        nu_a: inv.a.max(0.0).sqrt(),
        nu_b: inv.b.max(0.0).sqrt(),
    })
}

/// Global symplectic eigenvalues from the block invariants,
/// `nu^2 = (Delta -+ sqrt(Delta^2 - 4 det sigma)) / 2` with
/// `Delta = det A + det B + 2 det C`. Independent of [`symplectic_spectrum`];
/// accurate to about `sqrt(eps)` near pure states.
pub fn symplectic_eigenvalues_closed_form(cov: &CovarianceMatrix) -> [f64; 2] {
    let inv = BlockInvariants::of(cov);
    let delta = inv.a + inv.b + 2.0 * inv.c;
    let disc = (delta * delta - 4.0 * inv.d).max(0.0).sqrt();
    let plus_sq = 0.5 * (delta + disc);
    let minus_sq = if plus_sq > 0.0 { inv.d / plus_sq } else { 0.0 };
    [minus_sq.max(0.0).sqrt(), plus_sq.max(0.0).sqrt()]
}

fn check_physical(nu: f64) -> Result<f64> {
    if nu.is_nan() || nu < 1.0 - PHYSICALITY_TOL {
        return Err(Error::UnphysicalState { nu });
    }
    Ok(nu.max(1.0))
}

/// Von Neumann entropy of a single-mode thermal state with symplectic
/// eigenvalue `nu` (shot-noise units).
pub fn entropy(nu: f64) -> Result<f64> {
    let nu = check_physical(nu)?;
    let xp = 0.5 * (nu + 1.0);
    let xm = 0.5 * (nu - 1.0);
    // xp ln xp - xm ln xm rewritten without cancellation for large nu;
    // the second term vanishes as xm -> 0.
    let tail = if xm > 0.0 { xm * xm.recip().ln_1p() } else { 0.0 };
    Ok(xp.ln() + tail)
}

pub fn mutual_information(cov: &CovarianceMatrix) -> Result<f64> {
    let sp = symplectic_spectrum(cov)?;
    let i = entropy(sp.nu_a)? + entropy(sp.nu_b)? - entropy(sp.nu_minus)? - entropy(sp.nu_plus)?;
    Ok(i.max(0.0))
}

/// Which oscillator the discord measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasuredParty {
    First,
    #[default]
    Second,
}

impl fmt::Display for MeasuredParty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasuredParty::First => "first",
            MeasuredParty::Second => "second",
        })
    }
}

impl FromStr for MeasuredParty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "1" => Ok(MeasuredParty::First),
            "second" | "2" => Ok(MeasuredParty::Second),
            other => Err(Error::Domain(format!(
                "measured party must be first or second, got {other:?}"
            ))),
        }
    }
}

/// Minimal conditional determinant over Gaussian measurements on the mode
/// whose block determinant is `b`.
fn e_min(inv: &BlockInvariants) -> f64 {
    let BlockInvariants { a, b, c, d } = *inv;
    let c2 = c * c;
    let lhs = (d - a * b).powi(2);
    let rhs = (1.0 + b) * c2 * (a + d);
    if lhs <= rhs {
        let root = (c2 + (b - 1.0) * (d - a)).max(0.0).sqrt();
        (2.0 * c2 + (b - 1.0) * (d - a) + 2.0 * c.abs() * root) / (b - 1.0).powi(2)
    } else {
        let root = (c2 * c2 + lhs - 2.0 * c2 * (a * b + d)).max(0.0).sqrt();
        (a * b - c2 + d - root) / (2.0 * b)
    }
}

/// Gaussian quantum discord with the measurement on oscillator 2.
pub fn gaussian_discord(cov: &CovarianceMatrix) -> Result<f64> {
    gaussian_discord_on(cov, MeasuredParty::Second)
}

pub fn gaussian_discord_on(cov: &CovarianceMatrix, party: MeasuredParty) -> Result<f64> {
    let mut inv = BlockInvariants::of(cov);
    if party == MeasuredParty::First {
        inv = inv.swapped();
    }
    if (inv.b - 1.0).abs() <= PURE_TOL {
        if cov.sigma.fixed_view::<2, 2>(0, 2).norm() > 1e-10 {
            return Err(Error::DegenerateState(
                "measured mode is pure but correlated with the other mode".into(),
            ));
        }
        return Ok(0.0);
    }
    let sp = symplectic_spectrum(cov)?;
    let s_global = entropy(sp.nu_minus)? + entropy(sp.nu_plus)?;
    let nu_measured = check_physical(inv.b.max(0.0).sqrt())?;
    let em = e_min(&inv);
    let delta = entropy(nu_measured)? - s_global + entropy(em.max(0.0).sqrt())?;
    if delta < -1e-12 {
        log::debug!("discord evaluated to {delta:e}; clamping to 0");
    }
    Ok(delta.max(0.0))
}

/// Logarithmic negativity from the partially transposed covariance.
pub fn log_negativity(cov: &CovarianceMatrix) -> Result<f64> {
    let flip = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
    let (nu_t, _) = williamson_pair(&(flip * cov.sigma * flip))?;
    Ok((-nu_t.ln()).max(0.0))
}

/// Per-sample information summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InfoRecord {
    pub t: f64,
    pub mutual_info: f64,
    pub discord: f64,
    pub log_negativity: f64,
    /// Smallest global or reduced symplectic eigenvalue.
    pub nu_min: f64,
}

pub fn info_record(cov: &CovarianceMatrix, t: f64, party: MeasuredParty) -> Result<InfoRecord> {
    let sp = symplectic_spectrum(cov)?;
    check_physical(sp.min())?;
    Ok(InfoRecord {
        t,
        mutual_info: mutual_information(cov)?,
        discord: gaussian_discord_on(cov, party)?,
        log_negativity: log_negativity(cov)?,
        nu_min: sp.min(),
    })
}
