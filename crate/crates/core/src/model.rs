//! System and bath parameters, normal-mode diagonalization and the
//! dissipation/diffusion coefficients of the normal-mode master equation.
//!
//! Mode index 0 is the low-frequency mode `X-`, index 1 the high-frequency
//! mode `X+`. The lab coordinates are recovered through
//! `x1 = c X- + s X+` and `x2 = -s X- + c X+`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the low-frequency normal mode `X-`.
pub const MINUS: usize = 0;
/// Index of the high-frequency normal mode `X+`.
pub const PLUS: usize = 1;

/// Two coupled oscillators with unit masses: frequencies and bilinear position coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
}

impl SystemParams {
    pub fn new(omega1: f64, omega2: f64, lambda: f64) -> Result<Self> {
        let sys = SystemParams {
            omega1,
            omega2,
            lambda,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > 0.0 && self.omega1.is_finite()) {
            return Err(Error::Domain(format!("omega1 must be > 0, got {}", self.omega1)));
        }
        if !(self.omega2 > 0.0 && self.omega2.is_finite()) {
            return Err(Error::Domain(format!("omega2 must be > 0, got {}", self.omega2)));
        }
        if !self.lambda.is_finite() || self.lambda.abs() >= self.omega1 * self.omega2 {
            return Err(Error::Domain(format!(
                "coupling must satisfy |lambda| < omega1*omega2 (attractive potential): \
                 |{}| >= {}",
                self.lambda,
                self.omega1 * self.omega2
            )));
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            omega1: 1.0,
            omega2: 1.4,
            lambda: 0.7,
        }
    }
}

/// How the oscillators couple to their environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// One bath coupled to `x1 + x2`.
    #[serde(rename = "common")]
    CommonBath,
    /// Two identical, independent baths coupled to `x1` and `x2`.
    #[serde(rename = "separate")]
    SeparateBaths,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::CommonBath => write!(f, "common"),
            Topology::SeparateBaths => write!(f, "separate"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "common" | "cb" => Ok(Topology::CommonBath),
            "separate" | "sb" => Ok(Topology::SeparateBaths),
            other => Err(Error::Domain(format!(
                "bath must be \"common\" or \"separate\", got {other:?}"
            ))),
        }
    }
}

/// Ohmic bath with Lorentz-Drude cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub gamma: f64,
    pub cutoff: f64,
    pub temperature: f64,
    pub topology: Topology,
}

impl BathParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("cutoff", self.cutoff),
            ("temperature", self.temperature),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_topology(self, topology: Topology) -> Self {
        BathParams { topology, ..self }
    }

    /// Friction sampled at frequency `omega`: `gamma * cutoff^2 / (cutoff^2 + omega^2)`.
    pub fn damping_rate(&self, omega: f64) -> f64 {
        let l2 = self.cutoff * self.cutoff;
        self.gamma * l2 / (l2 + omega * omega)
    }

    /// Normal diffusion sampled at `omega`: `damping_rate(omega) * omega * coth(omega / 2T)`.
    pub fn diffusion_rate(&self, omega: f64) -> f64 {
        self.damping_rate(omega) * omega_coth(omega, self.temperature)
    }
}

impl Default for BathParams {
    fn default() -> Self {
        BathParams {
            gamma: 0.01,
            cutoff: 50.0,
            temperature: 10.0,
            topology: Topology::CommonBath,
        }
    }
}

/// `omega * coth(omega / 2T)`, finite at `omega = 0`.
fn omega_coth(omega: f64, temperature: f64) -> f64 {
    let x = omega / (2.0 * temperature);
    if x.abs() < 1e-8 {
        2.0 * temperature + omega * omega / (6.0 * temperature)
    } else {
        omega / x.tanh()
    }
}

/// `coth(omega / 2T)`; the thermal occupation factor `2n + 1`.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    let x = omega / (2.0 * temperature);
    if x.abs() < 1e-8 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// Rotation that diagonalizes the potential, with the mode frequencies and
/// the weights with which each mode enters `x1 + x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalModeBasis {
    pub theta: f64,
    pub c: f64,
    pub s: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
}

impl NormalModeBasis {
    /// Mode frequencies indexed by [`MINUS`] / [`PLUS`].
    pub fn frequencies(&self) -> [f64; 2] {
        [self.omega_minus, self.omega_plus]
    }

    pub fn kappas(&self) -> [f64; 2] {
        [self.kappa_minus, self.kappa_plus]
    }
}

/// Diagonalizes `[[w1^2, lambda], [lambda, w2^2]]`.
///
/// The angle is `theta = atan2(2 lambda, w2^2 - w1^2) / 2`, so `X- -> x1` as
/// `lambda -> 0` when `w2 > w1`.
pub fn diagonalize(sys: &SystemParams) -> Result<NormalModeBasis> {
    sys.validate()?;
    let w1s = sys.omega1 * sys.omega1;
    let w2s = sys.omega2 * sys.omega2;
    let detuning = w2s - w1s;
    let two_lambda = 2.0 * sys.lambda;

    let (theta, c, s) = if detuning == 0.0 && sys.lambda != 0.0 {
        // exact symmetric/antisymmetric modes; keeps kappa exactly zero
        let sign = sys.lambda.signum();
        (sign * FRAC_PI_4, FRAC_1_SQRT_2, sign * FRAC_1_SQRT_2)
    } else {
        let theta = 0.5 * two_lambda.atan2(detuning);
        (theta, theta.cos(), theta.sin())
    };

    let root = two_lambda.hypot(detuning);
    let sum = w1s + w2s;
    // product form avoids cancellation in the lower eigenvalue
    let omega_plus_sq = 0.5 * (sum + root);
    let omega_minus_sq = (w1s * w2s - sys.lambda * sys.lambda) / omega_plus_sq;
    if omega_minus_sq <= 0.0 {
        return Err(Error::Domain(format!(
            "|lambda| < omega1*omega2 violated: lower mode frequency squared {omega_minus_sq}"
        )));
    }

    Ok(NormalModeBasis {
        theta,
        c,
        s,
        omega_minus: omega_minus_sq.sqrt(),
        omega_plus: omega_plus_sq.sqrt(),
        kappa_minus: c - s,
        kappa_plus: c + s,
    })
}

/// Lorentz-Drude Ohmic spectral density `J(W) = (2 gamma / pi) W cutoff^2 / (cutoff^2 + W^2)`.
pub fn spectral_density(bath: &BathParams, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "spectral density needs omega >= 0, got {omega}"
        )));
    }
    Ok(2.0 / std::f64::consts::PI * omega * bath.damping_rate(omega))
}

/// Damping (`gamma`), normal diffusion (`diffusion`) and anomalous diffusion
/// (`anomalous`) coefficients, indexed `[m][n]` with [`MINUS`]/[`PLUS`].
///
/// `gamma[m][n]` is the friction on mode `m` proportional to the momentum of mode `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationCoefficients {
    pub gamma: [[f64; 2]; 2],
    pub diffusion: [[f64; 2]; 2],
    pub anomalous: [[f64; 2]; 2],
}

impl DissipationCoefficients {
    /// The same coefficients with every mixed-index entry set to zero.
    pub fn without_cross_terms(&self) -> Self {
        let mut out = *self;
        for m in [&mut out.gamma, &mut out.diffusion, &mut out.anomalous] {
            m[MINUS][PLUS] = 0.0;
            m[PLUS][MINUS] = 0.0;
        }
        out
    }
}

/// Bath coupling weights of the normal modes, one row per bath.
fn bath_weights(topology: Topology, c: f64, s: f64) -> Vec<[f64; 2]> {
    match topology {
        Topology::CommonBath => vec![[c - s, c + s]],
        Topology::SeparateBaths => vec![[c, s], [-s, c]],
    }
}

/// Builds the coefficients from arbitrary per-frequency rate functions.
fn coefficients_from_rates(
    topology: Topology,
    c: f64,
    s: f64,
    frequencies: [f64; 2],
    damping: impl Fn(f64) -> f64,
    diffusion: impl Fn(f64) -> f64,
) -> DissipationCoefficients {
    let mut out = DissipationCoefficients {
        gamma: [[0.0; 2]; 2],
        diffusion: [[0.0; 2]; 2],
        anomalous: [[0.0; 2]; 2],
    };
    let rates = frequencies.map(&damping);
    let diffs = frequencies.map(&diffusion);
    for u in bath_weights(topology, c, s) {
        for m in 0..2 {
            for n in 0..2 {
                out.gamma[m][n] += u[m] * u[n] * rates[n];
                out.diffusion[m][n] += u[m] * u[n] * diffs[n];
            }
        }
    }
    out
}

/// Asymptotic weak-coupling coefficients in the normal-mode basis. Each
/// column `n` is sampled at the frequency of mode `n`; anomalous diffusion is zero.
pub fn dissipation_coefficients(
    sys: &SystemParams,
    bath: &BathParams,
    basis: &NormalModeBasis,
) -> Result<DissipationCoefficients> {
    sys.validate()?;
    bath.validate()?;
    if bath.gamma > 0.1 * sys.omega1 {
        log::warn!(
            "gamma = {} exceeds 0.1*omega1; weak-coupling coefficients may be inaccurate",
            bath.gamma
        );
    }
    Ok(coefficients_from_rates(
        bath.topology,
        basis.c,
        basis.s,
        basis.frequencies(),
        |w| bath.damping_rate(w),
        |w| bath.diffusion_rate(w),
    ))
}

/// Decay-rate estimates of `<P-^2>`, `<P+^2>` and of the mixed moment `<P+ P->`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaRates {
    pub minus: f64,
    pub plus: f64,
    pub average: f64,
}

impl RwaRates {
    pub fn as_array(&self) -> [f64; 3] {
        [self.minus, self.average, self.plus]
    }
}

pub fn rwa_rates(sys: &SystemParams, bath: &BathParams, basis: &NormalModeBasis) -> Result<RwaRates> {
    let k = dissipation_coefficients(sys, bath, basis)?;
    let minus = k.gamma[MINUS][MINUS];
    let plus = k.gamma[PLUS][PLUS];
    Ok(RwaRates {
        minus,
        plus,
        average: 0.5 * (minus + plus),
    })
}

/// Outcome of comparing the bare-coefficient tilde formulas against
/// [`dissipation_coefficients`] in the flat-spectrum limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixEquivalence {
    /// Ratio reference/ours, common bath.
    pub common_ratio: f64,
    /// Ratio reference/ours, separate baths.
    pub separate_ratio: f64,
    /// Largest relative spread of the ratio over all entries and angles.
    pub max_deviation: f64,
    pub thetas: Vec<f64>,
    /// Entries skipped because both sides vanish.
    pub skipped: usize,
}

impl AppendixEquivalence {
    pub fn passes(&self) -> bool {
        self.max_deviation <= 1e-10
    }
}

/// Tilde coefficients written in terms of bare lab-frame coefficients
/// `(g11, g22, g12)`; returns `[[--, -+], [+-, ++]]`.
fn appendix_tilde(topology: Topology, c: f64, s: f64, g11: f64, g22: f64, g12: f64) -> [[f64; 2]; 2] {
    match topology {
        Topology::CommonBath => {
            let mm = (c - s) * (c * g11 - s * g22) + (1.0 - 2.0 * s * c) * g12;
            let pp = (c + s) * (c * g11 + s * g22) + (1.0 + 2.0 * s * c) * g12;
            let mp = (c - s) * (c * g22 + s * g11) + (c * c - s * s) * g12;
            let pm = (c + s) * (c * g11 - s * g22) + (c * c - s * s) * g12;
            [[mm, mp], [pm, pp]]
        }
        Topology::SeparateBaths => {
            let mm = c * c * g11 + s * s * g22 - 2.0 * c * s * g12;
            let pp = c * c * g11 + s * s * g22 + 2.0 * c * s * g12;
            let x = c * s * (g11 - g22) + (c * c - s * s) * g12;
            [[mm, x], [x, pp]]
        }
    }
}

/// Flat-limit check over `theta` in `[0, pi/4]` (plus the angle of `basis`):
/// the bare-coefficient tilde formulas and the mode-weight construction must differ by a
/// single constant per topology.
pub fn check_appendix_equivalence(basis: &NormalModeBasis) -> AppendixEquivalence {
    let mut thetas: Vec<f64> = (0..=16).map(|k| k as f64 * FRAC_PI_4 / 16.0).collect();
    thetas.push(basis.theta);

    let flat_rate = 1.0;
    let mut skipped = 0;
    let mut ratios = [Vec::new(), Vec::new()];
    for (slot, topology) in [Topology::CommonBath, Topology::SeparateBaths]
        .into_iter()
        .enumerate()
    {
        for &theta in &thetas {
            let (c, s) = (theta.cos(), theta.sin());
            let ours = coefficients_from_rates(topology, c, s, [1.0, 1.0], |_| flat_rate, |_| flat_rate);
            let bare_cross = match topology {
                Topology::CommonBath => flat_rate,
                Topology::SeparateBaths => 0.0,
            };
            let theirs = appendix_tilde(topology, c, s, flat_rate, flat_rate, bare_cross);
            for (row_a, row_b) in theirs.iter().zip(&ours.gamma) {
                for (&a, &b) in row_a.iter().zip(row_b) {
                    if a.abs() < 1e-12 && b.abs() < 1e-12 {
                        skipped += 1;
                        continue;
                    }
                    ratios[slot].push(a / b);
                }
            }
        }
    }

    let mut max_deviation: f64 = 0.0;
    let mut reference = [f64::NAN; 2];
    for (slot, rs) in ratios.iter().enumerate() {
        let r0 = rs[0];
        reference[slot] = r0;
        for r in rs {
            max_deviation = max_deviation.max(((r - r0) / r0).abs());
        }
    }

    AppendixEquivalence {
        common_ratio: reference[0],
        separate_ratio: reference[1],
        max_deviation,
        thetas,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, SymmetricEigen};

    fn sys(w2: f64, lambda: f64) -> SystemParams {
        SystemParams::new(1.0, w2, lambda).unwrap()
    }

    #[test]
    fn symmetric_case_is_quarter_turn() {
        let b = diagonalize(&sys(1.0, 0.5)).unwrap();
        assert_relative_eq!(b.theta, FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(b.omega_minus.powi(2), 0.5, epsilon = 1e-14);
        assert_relative_eq!(b.omega_plus.powi(2), 1.5, epsilon = 1e-14);
        assert_eq!(b.kappa_minus, 0.0);
    }

    #[test]
    fn uncoupled_is_identity() {
        let b = diagonalize(&sys(1.4, 0.0)).unwrap();
        assert_eq!(b.theta, 0.0);
        assert_eq!((b.c, b.s), (1.0, 0.0));
        assert_relative_eq!(b.omega_minus, 1.0, epsilon = 1e-15);
        assert_relative_eq!(b.omega_plus, 1.4, epsilon = 1e-15);
    }

    #[test]
    fn detuned_case_matches_eigendecomposition() {
        let b = diagonalize(&sys(1.4, 0.7)).unwrap();
        let k = Matrix2::new(1.0, 0.7, 0.7, 1.96);
        let eig = SymmetricEigen::new(k);
        let mut w: Vec<f64> = eig.eigenvalues.iter().map(|v: &f64| v.sqrt()).collect();
        w.sort_by(f64::total_cmp);
        assert_relative_eq!(b.omega_minus, w[0], epsilon = 1e-13);
        assert_relative_eq!(b.omega_plus, w[1], epsilon = 1e-13);
        // eigenvector of the lower eigenvalue is (c, -s) up to sign
        let idx = if eig.eigenvalues[0] < eig.eigenvalues[1] {
            0
        } else {
            1
        };
        let v = eig.eigenvectors.column(idx);
        assert_relative_eq!((v[0] * b.c - v[1] * b.s).abs(), 1.0, epsilon = 1e-12);
        assert!((b.theta - 0.484_861).abs() < 1e-6);
        assert!((b.omega_minus - 0.794_504).abs() < 1e-6);
        assert!((b.omega_plus - 1.526_029).abs() < 1e-6);
    }

    #[test]
    fn rotation_diagonalizes_potential() {
        for &(w2, l) in &[(1.4, 0.7), (1.05, 0.3), (1.31, 0.9), (0.8, -0.5), (2.0, 1.9)] {
            let s = sys(w2, l);
            let b = diagonalize(&s).unwrap();
            let k = Matrix2::new(1.0, l, l, w2 * w2);
            let r = Matrix2::new(b.c, -b.s, b.s, b.c);
            let d = r * k * r.transpose();
            let scale = d[(0, 0)].abs().max(d[(1, 1)].abs());
            assert!(d[(0, 1)].abs() / scale < 1e-12);
            assert_relative_eq!(d[(0, 0)], b.omega_minus.powi(2), max_relative = 1e-12);
            assert_relative_eq!(d[(1, 1)], b.omega_plus.powi(2), max_relative = 1e-12);
            assert_relative_eq!(b.c * b.c + b.s * b.s, 1.0, epsilon = 1e-15);
            assert_relative_eq!(b.kappa_minus.powi(2) + b.kappa_plus.powi(2), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn detuning_below_unity_is_allowed() {
        let b = diagonalize(&sys(0.7, 0.3)).unwrap();
        assert!(b.theta > FRAC_PI_4 && b.theta < std::f64::consts::FRAC_PI_2);
        assert!(b.omega_plus >= b.omega_minus);
    }

    #[test]
    fn repulsive_potential_rejected() {
        let s = SystemParams {
            omega1: 1.0,
            omega2: 1.4,
            lambda: 2.0,
        };
        let err = diagonalize(&s).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("|lambda| < omega1*omega2")));
        assert!(SystemParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn spectral_density_values() {
        let bath = BathParams::default();
        assert_eq!(spectral_density(&bath, 0.0).unwrap(), 0.0);
        let at_cutoff = spectral_density(&bath, bath.cutoff).unwrap();
        assert_relative_eq!(
            at_cutoff,
            bath.gamma * bath.cutoff / std::f64::consts::PI,
            max_relative = 1e-14
        );
        let j1 = spectral_density(&bath, 1.0).unwrap();
        assert!((j1 - 6.3637e-3).abs() < 1e-7);
        assert!(spectral_density(&bath, -1.0).is_err());
    }

    #[test]
    fn decoherence_free_mode_for_identical_oscillators() {
        let s = sys(1.0, 0.4);
        let b = diagonalize(&s).unwrap();
        let k = dissipation_coefficients(&s, &BathParams::default(), &b).unwrap();
        assert_eq!(k.gamma[MINUS][MINUS], 0.0);
        assert_eq!(k.diffusion[MINUS][MINUS], 0.0);
        assert_eq!(k.gamma[MINUS][PLUS], 0.0);
        assert!(k.gamma[PLUS][PLUS] > 0.0);
        let r = rwa_rates(&s, &BathParams::default(), &b).unwrap();
        assert_eq!(r.minus, 0.0);
        assert_relative_eq!(
            r.plus,
            2.0 * BathParams::default().damping_rate(b.omega_plus),
            max_relative = 1e-14
        );
    }

    #[test]
    fn separate_baths_have_no_cross_terms() {
        for &(w2, l) in &[(1.4, 0.7), (1.05, 0.3), (1.0, 0.2), (1.31, -0.9)] {
            let s = sys(w2, l);
            let b = diagonalize(&s).unwrap();
            let bath = BathParams::default().with_topology(Topology::SeparateBaths);
            let k = dissipation_coefficients(&s, &bath, &b).unwrap();
            assert!(k.gamma[0][1].abs() < 1e-18 && k.gamma[1][0].abs() < 1e-18);
            assert!(k.diffusion[0][1].abs() < 1e-16 && k.diffusion[1][0].abs() < 1e-16);
        }
    }

    #[test]
    fn uncoupled_rates_near_gamma() {
        for topology in [Topology::CommonBath, Topology::SeparateBaths] {
            let s = sys(1.31, 0.0);
            let b = diagonalize(&s).unwrap();
            let bath = BathParams::default().with_topology(topology);
            let r = rwa_rates(&s, &bath, &b).unwrap();
            assert!((r.minus - 0.01).abs() < 1e-5);
            assert!((r.plus - 0.01).abs() < 1e-5);
        }
    }

    #[test]
    fn common_bath_rate_separation() {
        let s = sys(1.31, 0.9);
        let b = diagonalize(&s).unwrap();
        let r = rwa_rates(&s, &BathParams::default(), &b).unwrap();
        let kappa_ratio = (b.kappa_minus / b.kappa_plus).powi(2);
        assert!((kappa_ratio - 0.037).abs() < 1e-3);
        // cutoff factors differ slightly between the two mode frequencies
        assert_relative_eq!(r.minus / r.plus, kappa_ratio, max_relative = 1e-3);
    }

    #[test]
    fn coefficients_continuous_at_zero_coupling() {
        let bath = BathParams::default();
        let at = |l: f64| {
            let s = sys(1.2, l);
            dissipation_coefficients(&s, &bath, &diagonalize(&s).unwrap()).unwrap()
        };
        let (a, b) = (at(-1e-9), at(1e-9));
        for m in 0..2 {
            for n in 0..2 {
                assert!((a.gamma[m][n] - b.gamma[m][n]).abs() < 1e-10);
                assert!((a.diffusion[m][n] - b.diffusion[m][n]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn high_temperature_diffusion_ratio() {
        let bath = BathParams::default();
        let ratio = bath.diffusion_rate(1.0) / bath.damping_rate(1.0);
        assert!((ratio / (2.0 * bath.temperature) - 1.0).abs() < 0.01);
        // series branch agrees with the direct formula at the switch-over
        let t: f64 = 10.0;
        let w = 2.0 * t * 1.01e-8;
        let direct = w / (w / (2.0 * t)).tanh();
        assert_relative_eq!(omega_coth(w, t), direct, max_relative = 1e-12);
        assert_relative_eq!(omega_coth(0.0, t), 2.0 * t);
    }

    #[test]
    fn appendix_formulas_agree_up_to_constant() {
        let b = diagonalize(&sys(1.31, 0.9)).unwrap();
        let report = check_appendix_equivalence(&b);
        assert!(report.passes(), "{report:?}");
        assert_relative_eq!(report.common_ratio, 2.0, epsilon = 1e-12);
        assert_relative_eq!(report.separate_ratio, 1.0, epsilon = 1e-12);
        assert!(report.skipped > 0);
    }

    #[test]
    fn topology_parsing() {
        assert_eq!("common".parse::<Topology>().unwrap(), Topology::CommonBath);
        assert_eq!("Separate".parse::<Topology>().unwrap(), Topology::SeparateBaths);
        assert!("both".parse::<Topology>().is_err());
    }
}
