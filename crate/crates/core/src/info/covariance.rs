use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::dynamics::*;
use crate::error::{Error, Result};
use crate::model::{NormalModeBasis, SystemParams};

/// Two-mode covariance over `(q1, p1, q2, p2)` in shot-noise units
/// (vacuum is the identity). `sigma` holds central, symmetrized moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub sigma: Matrix4<f64>,
    pub means: Vector4<f64>,
}

impl CovarianceMatrix {
    pub fn new(sigma: Matrix4<f64>) -> Self {
        CovarianceMatrix {
            sigma,
            means: Vector4::zeros(),
        }
    }

    pub fn vacuum() -> Self {
        Self::new(Matrix4::identity())
    }

    /// Raw second moment `<q_i^2>` of oscillator `i` (0 or 1), i.e. the
    /// position variance plus squared mean, in shot-noise units.
    pub fn position_second_moment(&self, i: usize) -> f64 {
        let k = 2 * i;
        self.sigma[(k, k)] + self.means[k] * self.means[k]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.sigma.abs().max().max(1.0);
        (self.sigma - self.sigma.transpose()).abs().max() <= tol * scale
    }
}

/// Initial states offered for simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialStateSpec {
    Vacuum,
    /// `exp[-r (a1+ a2+ - a1 a2) / 2]` acting on the vacuum.
    TwoModeSqueezed {
        r: f64,
    },
    /// Independent position squeezing of each oscillator.
    SeparableSqueezed {
        r1: f64,
        r2: f64,
    },
}

pub const MAX_SQUEEZING: f64 = 10.0;

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec::SeparableSqueezed { r1: 2.0, r2: 4.0 }
    }
}

impl InitialStateSpec {
    pub fn validate(&self) -> Result<()> {
        let rs: &[f64] = match self {
            InitialStateSpec::Vacuum => &[],
            InitialStateSpec::TwoModeSqueezed { r } => &[*r],
            InitialStateSpec::SeparableSqueezed { r1, r2 } => &[*r1, *r2],
        };
        for &r in rs {
            if !r.is_finite() || r.abs() > MAX_SQUEEZING {
                return Err(Error::Domain(format!(
                    "squeezing parameter must be finite with |r| <= {MAX_SQUEEZING}, got {r}"
                )));
            }
        }
        Ok(())
    }

    /// Lab-frame covariance in shot-noise units.
    pub fn lab_covariance(&self) -> Result<CovarianceMatrix> {
        self.validate()?;
        let sigma = match *self {
            InitialStateSpec::Vacuum => Matrix4::identity(),
            InitialStateSpec::SeparableSqueezed { r1, r2 } => Matrix4::from_diagonal(&Vector4::new(
                (-2.0 * r1).exp(),
                (2.0 * r1).exp(),
                (-2.0 * r2).exp(),
                (2.0 * r2).exp(),
            )),
            InitialStateSpec::TwoModeSqueezed { r } => {
                let (ch, sh) = (r.cosh(), r.sinh());
                Matrix4::new(
                    ch, 0.0, sh, 0.0, //
                    0.0, ch, 0.0, -sh, //
                    sh, 0.0, ch, 0.0, //
                    0.0, -sh, 0.0, ch,
                )
            }
        };
        Ok(CovarianceMatrix::new(sigma))
    }
}

impl fmt::Display for InitialStateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialStateSpec::Vacuum => write!(f, "vacuum"),
            InitialStateSpec::TwoModeSqueezed { r } => write!(f, "tms:{r}"),
            InitialStateSpec::SeparableSqueezed { r1, r2 } => write!(f, "sq:{r1}:{r2}"),
        }
    }
}

impl FromStr for InitialStateSpec {
    type Err = Error;

    /// Parses `vacuum`, `tms:R` or `sq:R1:R2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("invalid squeezing parameter {t:?}")))
        };
        let spec = match parts.as_slice() {
            ["vacuum"] => InitialStateSpec::Vacuum,
            ["tms", r] => InitialStateSpec::TwoModeSqueezed { r: num(r)? },
            ["sq", r1, r2] => InitialStateSpec::SeparableSqueezed {
                r1: num(r1)?,
                r2: num(r2)?,
            },
            _ => {
                return Err(Error::Domain(format!(
                    "initial state must be vacuum, tms:R or sq:R1:R2, got {s:?}"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Linear map from mode phase-space coordinates `(X-, P-, X+, P+)` to lab
/// shot-noise coordinates `(q1, p1, q2, p2)`.
fn mode_to_lab(basis: &NormalModeBasis, sys: &SystemParams) -> Matrix4<f64> {
    let (c, s) = (basis.c, basis.s);
    let rotation = Matrix4::new(
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, s, //
        -s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    );
    let scale = Matrix4::from_diagonal(&Vector4::new(
        (2.0 * sys.omega1).sqrt(),
        (2.0 / sys.omega1).sqrt(),
        (2.0 * sys.omega2).sqrt(),
        (2.0 / sys.omega2).sqrt(),
    ));
    scale * rotation
}

fn lab_to_mode(basis: &NormalModeBasis, sys: &SystemParams) -> Matrix4<f64> {
    let (c, s) = (basis.c, basis.s);
    let rotation_t = Matrix4::new(
        c, 0.0, -s, 0.0, //
        0.0, c, 0.0, -s, //
        s, 0.0, c, 0.0, //
        0.0, s, 0.0, c,
    );
    let inv_scale = Matrix4::from_diagonal(&Vector4::new(
        (2.0 * sys.omega1).sqrt().recip(),
        (2.0 / sys.omega1).sqrt().recip(),
        (2.0 * sys.omega2).sqrt().recip(),
        (2.0 / sys.omega2).sqrt().recip(),
    ));
    rotation_t * inv_scale
}

/// Symmetrized 4x4 raw-moment matrix over `(X-, P-, X+, P+)`.
fn unpack(r: &SecondMoments) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    let mut set = |i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        m[(j, i)] = v;
    };
    set(0, 0, r[XM_XM]);
    set(2, 2, r[XP_XP]);
    set(0, 2, r[XM_XP]);
    set(1, 1, r[PM_PM]);
    set(3, 3, r[PP_PP]);
    set(1, 3, r[PM_PP]);
    set(0, 1, 0.5 * r[XM_PM]);
    set(2, 3, 0.5 * r[XP_PP]);
    set(0, 3, 0.5 * r[XM_PP]);
    set(2, 1, 0.5 * r[XP_PM]);
    m
}

fn pack(m: &Matrix4<f64>) -> SecondMoments {
    let sym = |i: usize, j: usize| 0.5 * (m[(i, j)] + m[(j, i)]);
    let mut r = SecondMoments::zeros();
    r[XM_XM] = m[(0, 0)];
    r[XP_XP] = m[(2, 2)];
    r[XM_XP] = sym(0, 2);
    r[PM_PM] = m[(1, 1)];
    r[PP_PP] = m[(3, 3)];
    r[PM_PP] = sym(1, 3);
    r[XM_PM] = 2.0 * sym(0, 1);
    r[XP_PP] = 2.0 * sym(2, 3);
    r[XM_PP] = 2.0 * sym(0, 3);
    r[XP_PM] = 2.0 * sym(2, 1);
    r
}

/// Builds the normal-mode moments of an initial state (zero means, `t = 0`).
pub fn make_initial(
    spec: &InitialStateSpec,
    sys: &SystemParams,
    basis: &NormalModeBasis,
) -> Result<MomentState> {
    let lab = spec.lab_covariance()?;
    Ok(from_lab_covariance(&lab, basis, sys, 0.0))
}

/// Inverse of [`to_lab_covariance`].
pub fn from_lab_covariance(
    cov: &CovarianceMatrix,
    basis: &NormalModeBasis,
    sys: &SystemParams,
    time: f64,
) -> MomentState {
    let t = lab_to_mode(basis, sys);
    let means: FirstMoments = t * cov.means;
    let raw = t * cov.sigma * t.transpose() + means * means.transpose();
    MomentState {
        time,
        first: means,
        second: pack(&raw),
    }
}

/// Rotates mode moments back to the oscillators, removes the means and
/// rescales to shot-noise units.
pub fn to_lab_covariance(
    state: &MomentState,
    basis: &NormalModeBasis,
    sys: &SystemParams,
) -> CovarianceMatrix {
    let central = unpack(&state.second) - state.first * state.first.transpose();
    let l = mode_to_lab(basis, sys);
    let sigma = l * central * l.transpose();
    CovarianceMatrix {
        sigma: 0.5 * (sigma + sigma.transpose()),
        means: l * state.first,
    }
}
