use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use super::moments::{p1, pp, x1, xp, xx, SecondMoments};
use crate::error::{Error, Result};
use crate::model::{DissipationCoefficients, NormalModeBasis, MINUS, PLUS};

pub type DriftMatrix = SMatrix<f64, 10, 10>;

/// Which master equation the generator encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Weak-coupling equation with mode-mixing dissipation, damping on momenta only.
    Full,
    /// Secular (Lindblad) equation: modes dissipate independently.
    Rwa,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Full => write!(f, "full"),
            Backend::Rwa => write!(f, "rwa"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Backend::Full),
            "rwa" => Ok(Backend::Rwa),
            other => Err(Error::Domain(format!(
                "backend must be \"full\" or \"rwa\", got {other:?}"
            ))),
        }
    }
}

/// Linear generator `dR/dt = M R + N` for second moments and `d r/dt = A1 r`
/// for first moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentGenerator {
    pub m: DriftMatrix,
    pub n: SecondMoments,
    pub a1: Matrix4<f64>,
    pub backend: Backend,
}

impl MomentGenerator {
    pub fn trace(&self) -> f64 {
        self.m.trace()
    }
}

pub fn build_generator(
    basis: &NormalModeBasis,
    coeffs: &DissipationCoefficients,
    backend: Backend,
) -> Result<MomentGenerator> {
    match backend {
        Backend::Full => Ok(full_generator(basis, coeffs)),
        Backend::Rwa => rwa_generator(basis, coeffs),
    }
}

fn other(m: usize) -> usize {
    1 - m
}

fn full_generator(basis: &NormalModeBasis, k: &DissipationCoefficients) -> MomentGenerator {
    let w2 = basis.frequencies().map(|w| w * w);
    let g = &k.gamma;
    let mut m = DriftMatrix::zeros();
    let mut n = SecondMoments::zeros();

    for (i, j) in [(MINUS, MINUS), (PLUS, PLUS), (MINUS, PLUS)] {
        let r = xx(i, j);
        m[(r, xp(i, j))] += 0.5;
        m[(r, xp(j, i))] += 0.5;

        let r = pp(i, j);
        m[(r, xp(i, j))] -= 0.5 * w2[i];
        m[(r, xp(j, i))] -= 0.5 * w2[j];
        m[(r, pp(i, j))] -= g[i][i] + g[j][j];
        m[(r, pp(j, other(i)))] -= g[i][other(i)];
        m[(r, pp(i, other(j)))] -= g[j][other(j)];
        // the double commutator only sees the symmetric part of the mixed diffusion
        n[r] += if i == j {
            k.diffusion[i][j]
        } else {
            0.5 * (k.diffusion[MINUS][PLUS] + k.diffusion[PLUS][MINUS])
        };
    }

    for i in [MINUS, PLUS] {
        for j in [MINUS, PLUS] {
            let r = xp(i, j);
            m[(r, pp(i, j))] += 2.0;
            m[(r, xx(i, j))] -= 2.0 * w2[j];
            m[(r, xp(i, j))] -= g[j][j];
            m[(r, xp(i, other(j)))] -= g[j][other(j)];
            n[r] += k.anomalous[i][j];
        }
    }

    let mut a1 = Matrix4::zeros();
    for i in [MINUS, PLUS] {
        a1[(x1(i), p1(i))] = 1.0;
        a1[(p1(i), x1(i))] = -w2[i];
        a1[(p1(i), p1(i))] = -g[i][i];
        a1[(p1(i), p1(other(i)))] = -g[i][other(i)];
    }

    MomentGenerator {
        m,
        n,
        a1,
        backend: Backend::Full,
    }
}

fn rwa_generator(basis: &NormalModeBasis, k: &DissipationCoefficients) -> Result<MomentGenerator> {
    let freqs = basis.frequencies();
    for mode in [MINUS, PLUS] {
        let (gamma, diff) = (k.gamma[mode][mode], k.diffusion[mode][mode]);
        if diff / freqs[mode] < gamma {
            return Err(Error::Config(format!(
                "RWA backend needs D/Omega >= Gamma for every mode (non-negative excitation \
                 rate); mode {mode}: D/Omega = {}, Gamma = {gamma}",
                diff / freqs[mode]
            )));
        }
    }

    let w2 = freqs.map(|w| w * w);
    let mut m = DriftMatrix::zeros();
    let mut n = SecondMoments::zeros();
    let mut a1 = Matrix4::zeros();

    for i in [MINUS, PLUS] {
        let g = k.gamma[i][i];
        let d = k.diffusion[i][i];
        let (rx, rp, rxp) = (xx(i, i), pp(i, i), xp(i, i));
        m[(rx, rxp)] = 1.0;
        m[(rx, rx)] = -g;
        n[rx] = d / (2.0 * w2[i]);
        m[(rp, rxp)] = -w2[i];
        m[(rp, rp)] = -g;
        n[rp] = 0.5 * d;
        m[(rxp, rp)] = 2.0;
        m[(rxp, rx)] = -2.0 * w2[i];
        m[(rxp, rxp)] = -g;

        a1[(x1(i), p1(i))] = 1.0;
        a1[(x1(i), x1(i))] = -0.5 * g;
        a1[(p1(i), x1(i))] = -w2[i];
        a1[(p1(i), p1(i))] = -0.5 * g;
    }

    let average = 0.5 * (k.gamma[MINUS][MINUS] + k.gamma[PLUS][PLUS]);
    let r = xx(MINUS, PLUS);
    m[(r, xp(MINUS, PLUS))] = 0.5;
    m[(r, xp(PLUS, MINUS))] = 0.5;
    m[(r, r)] = -average;
    let r = pp(MINUS, PLUS);
    m[(r, xp(MINUS, PLUS))] = -0.5 * w2[MINUS];
    m[(r, xp(PLUS, MINUS))] = -0.5 * w2[PLUS];
    m[(r, r)] = -average;
    for (i, j) in [(MINUS, PLUS), (PLUS, MINUS)] {
        let r = xp(i, j);
        m[(r, pp(i, j))] = 2.0;
        m[(r, xx(i, j))] = -2.0 * w2[j];
        m[(r, r)] = -average;
    }

    Ok(MomentGenerator {
        m,
        n,
        a1,
        backend: Backend::Rwa,
    })
}
