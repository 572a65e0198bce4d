use nalgebra::{Matrix4, SMatrix, SVector};

use super::generator::MomentGenerator;
use super::moments::{FirstMoments, MomentState, SecondMoments};
use super::spectrum::{dynamical_eigenvalues, ZERO_MODE_TOL};
use crate::error::{Error, Result};

type Augmented = SMatrix<f64, 11, 11>;

/// Exact one-step propagator for a fixed time increment.
///
/// The affine system is embedded in an 11x11 matrix `[[M, N], [0, 0]]`, so a
/// singular `M` needs no special treatment.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    dt: f64,
    second: Augmented,
    first: Matrix4<f64>,
}

fn checked_exp<const D: usize>(m: SMatrix<f64, D, D>, what: &str) -> Result<SMatrix<f64, D, D>>
where
    nalgebra::Const<D>: nalgebra::DimMin<nalgebra::Const<D>, Output = nalgebra::Const<D>>,
{
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical(format!("{what}: non-finite generator")));
    }
    let e = m.exp();
    if !e.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical(format!("{what}: matrix exponential overflowed")));
    }
    Ok(e)
}

impl Propagator {
    pub fn new(gen: &MomentGenerator, dt: f64) -> Result<Self> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!(
                "propagation interval must be >= 0, got {dt}"
            )));
        }
        let mut aug = Augmented::zeros();
        aug.fixed_view_mut::<10, 10>(0, 0).copy_from(&(gen.m * dt));
        aug.fixed_view_mut::<10, 1>(0, 10).copy_from(&(gen.n * dt));
        Ok(Propagator {
            dt,
            second: checked_exp(aug, "second moments")?,
            first: checked_exp(gen.a1 * dt, "first moments")?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by `dt`, stamping the given time on the result.
    fn apply(&self, state: &MomentState, time: f64) -> MomentState {
        let e = &self.second;
        let second = e.fixed_view::<10, 10>(0, 0) * state.second + e.fixed_view::<10, 1>(0, 10);
        MomentState {
            time,
            first: self.first * state.first,
            second,
        }
    }

    pub fn step(&self, state: &MomentState) -> MomentState {
        self.apply(state, state.time + self.dt)
    }
}

/// `R(t) = exp(M dt) R0 + integral of the drive`, evaluated exactly.
pub fn propagate_exact(gen: &MomentGenerator, state: &MomentState, t: f64) -> Result<MomentState> {
    if !(t >= state.time) {
        return Err(Error::Domain(format!(
            "target time {t} precedes state time {}",
            state.time
        )));
    }
    if t == state.time {
        return Ok(*state);
    }
    Ok(Propagator::new(gen, t - state.time)?.apply(state, t))
}

/// Fixed-step classical Runge-Kutta integration; used as an independent check
/// of [`propagate_exact`].
pub fn propagate_stepwise(
    gen: &MomentGenerator,
    state: &MomentState,
    dt: f64,
    n_steps: usize,
) -> Result<MomentState> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step must be > 0, got {dt}")));
    }
    let f2 = |r: &SecondMoments| gen.m * r + gen.n;
    let f1 = |r: &FirstMoments| gen.a1 * r;
    let mut second = state.second;
    let mut first = state.first;
    for _ in 0..n_steps {
        second = rk4(&f2, &second, dt);
        first = rk4(&f1, &first, dt);
    }
    if !second.iter().chain(first.iter()).all(|v| v.is_finite()) {
        return Err(Error::Numerical("stepwise integration overflowed".into()));
    }
    Ok(MomentState {
        time: state.time + dt * n_steps as f64,
        first,
        second,
    })
}

fn rk4<const D: usize>(
    f: &impl Fn(&SVector<f64, D>) -> SVector<f64, D>,
    y: &SVector<f64, D>,
    h: f64,
) -> SVector<f64, D> {
    let k1 = f(y);
    let k2 = f(&(y + k1 * (0.5 * h)));
    let k3 = f(&(y + k2 * (0.5 * h)));
    let k4 = f(&(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Stationary moments `R = -M^-1 N` (first moments vanish).
pub fn steady_state(gen: &MomentGenerator) -> Result<MomentState> {
    let spectrum = dynamical_eigenvalues(gen)?;
    if spectrum.zero_modes > 0 || spectrum.max_real() >= -ZERO_MODE_TOL {
        return Err(Error::NoUniqueSteadyState {
            zero_modes: spectrum.zero_modes,
        });
    }
    let second = gen
        .m
        .lu()
        .solve(&(-gen.n))
        .ok_or_else(|| Error::Numerical("drift matrix is singular".into()))?;
    Ok(MomentState {
        time: f64::INFINITY,
        first: FirstMoments::zeros(),
        second,
    })
}

/// Uniformly sampled trajectory; sample `k` sits at `t0 + k * dt_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt_out: f64,
    pub samples: Vec<MomentState>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Number of whole `dt` steps in `span`, tolerant to representation error.
pub(crate) fn steps_in(span: f64, dt: f64) -> usize {
    (span / dt + 1e-9).floor() as usize
}

pub fn sample_trajectory(
    gen: &MomentGenerator,
    initial: &MomentState,
    t_max: f64,
    dt_out: f64,
) -> Result<Trajectory> {
    if !(dt_out > 0.0 && dt_out.is_finite()) {
        return Err(Error::Domain(format!("dt_out must be > 0, got {dt_out}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("t_max must be >= 0, got {t_max}")));
    }
    let n = steps_in(t_max, dt_out);
    let prop = Propagator::new(gen, dt_out)?;
    let t0 = initial.time;
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = *initial;
    samples.push(state);
    for k in 1..=n {
        state = prop.apply(&state, t0 + k as f64 * dt_out);
        samples.push(state);
    }
    Ok(Trajectory { dt_out, samples })
}
