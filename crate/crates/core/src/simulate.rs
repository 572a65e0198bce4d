//! End-to-end run: configuration, trajectory, lab observables, information
//! measures and synchronization indicator.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_generator, dynamical_eigenvalues, sample_trajectory, Backend, MomentGenerator, MomentState,
    Spectrum, Trajectory,
};
use crate::error::{Error, Result};
use crate::info::{
    info_record, make_initial, to_lab_covariance, InfoRecord, InitialStateSpec, MeasuredParty,
};
use crate::model::{
    diagonalize, dissipation_coefficients, rwa_rates, BathParams, DissipationCoefficients, NormalModeBasis,
    RwaRates, SystemParams,
};
use crate::sync::{windowed_correlation, ObservableSeries, SyncResult};

/// Fully resolved parameters of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub system: SystemParams,
    pub bath: BathParams,
    pub initial: InitialStateSpec,
    pub t_max: f64,
    pub dt_out: f64,
    /// Length of the synchronization window.
    pub window: f64,
    /// Standard deviation of the Gaussian smoothing filter, in time units.
    pub filter_width: f64,
    pub backend: Backend,
    /// Oscillator on which the discord measurement acts.
    pub measured: MeasuredParty,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemParams::default(),
            bath: BathParams::default(),
            initial: InitialStateSpec::default(),
            t_max: 400.0,
            dt_out: 0.1,
            window: 15.0,
            filter_width: 5.0,
            backend: Backend::Full,
            measured: MeasuredParty::Second,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be a finite number > 0, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.bath.validate()?;
        self.initial.validate()?;
        positive("t_max", self.t_max)?;
        positive("dt_out", self.dt_out)?;
        positive("window", self.window)?;
        positive("filter_width", self.filter_width)?;
        if self.dt_out > self.t_max {
            return Err(Error::Domain(format!(
                "dt_out ({}) must not exceed t_max ({})",
                self.dt_out, self.t_max
            )));
        }
        Ok(())
    }
}

/// Model quantities that do not depend on the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedModel {
    pub basis: NormalModeBasis,
    pub coefficients: DissipationCoefficients,
    pub rates: RwaRates,
    pub generator: MomentGenerator,
}

pub fn prepare_model(config: &RunConfig) -> Result<PreparedModel> {
    config.validate()?;
    let basis = diagonalize(&config.system)?;
    let coefficients = dissipation_coefficients(&config.system, &config.bath, &basis)?;
    let rates = rwa_rates(&config.system, &config.bath, &basis)?;
    let generator = build_generator(&basis, &coefficients, config.backend)?;
    Ok(PreparedModel {
        basis,
        coefficients,
        rates,
        generator,
    })
}

/// Lab-frame observables sampled along a trajectory, in shot-noise units.
#[derive(Debug, Clone, PartialEq)]
pub struct LabObservables {
    /// `<x1^2> / S1`.
    pub x1_sq: ObservableSeries,
    /// `<x2^2> / S2`.
    pub x2_sq: ObservableSeries,
    /// `<x1> / sqrt(S1)`.
    pub x1: ObservableSeries,
    /// `<x2> / sqrt(S2)`.
    pub x2: ObservableSeries,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub config: RunConfig,
    pub model: PreparedModel,
    pub spectrum: Spectrum,
    pub trajectory: Trajectory,
    pub observables: LabObservables,
    pub info: Vec<InfoRecord>,
    /// Indicator of `<x1^2>` and `<x2^2>`.
    pub sync: SyncResult,
}

/// Lab-frame observables of each sample.
pub fn lab_observables(
    config: &RunConfig,
    basis: &NormalModeBasis,
    samples: &[MomentState],
) -> Result<LabObservables> {
    let n = samples.len();
    let mut x1_sq = Vec::with_capacity(n);
    let mut x2_sq = Vec::with_capacity(n);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for s in samples {
        let cov = to_lab_covariance(s, basis, &config.system);
        x1_sq.push(cov.position_second_moment(0));
        x2_sq.push(cov.position_second_moment(1));
        x1.push(cov.means[0]);
        x2.push(cov.means[2]);
    }
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let series = |v| ObservableSeries::new(times.clone(), v);
    Ok(LabObservables {
        x1_sq: series(x1_sq)?,
        x2_sq: series(x2_sq)?,
        x1: series(x1)?,
        x2: series(x2)?,
    })
}

/// Information measures of one sample.
pub fn sample_info(config: &RunConfig, basis: &NormalModeBasis, sample: &MomentState) -> Result<InfoRecord> {
    let cov = to_lab_covariance(sample, basis, &config.system);
    info_record(&cov, sample.time, config.measured)
}

/// Lab observables and information records for each sample.
pub fn analyze_samples(
    config: &RunConfig,
    basis: &NormalModeBasis,
    samples: &[MomentState],
) -> Result<(LabObservables, Vec<InfoRecord>)> {
    let observables = lab_observables(config, basis, samples)?;
    let info = samples
        .iter()
        .map(|s| sample_info(config, basis, s))
        .collect::<Result<Vec<_>>>()?;
    Ok((observables, info))
}

/// Runs the configured initial state.
pub fn run_simulation(config: &RunConfig) -> Result<SimulationOutput> {
    let model = prepare_model(config)?;
    let initial = make_initial(&config.initial, &config.system, &model.basis)?;
    run_from_state(config, model, &initial)
}

/// Runs an arbitrary initial moment state (e.g. a displaced one).
pub fn run_from_state(
    config: &RunConfig,
    model: PreparedModel,
    initial: &MomentState,
) -> Result<SimulationOutput> {
    let spectrum = dynamical_eigenvalues(&model.generator)?;
    let trajectory = sample_trajectory(&model.generator, initial, config.t_max, config.dt_out)?;
    let (observables, info) = analyze_samples(config, &model.basis, &trajectory.samples)?;
    let sync = windowed_correlation(&observables.x1_sq, &observables.x2_sq, config.window)?;
    Ok(SimulationOutput {
        config: *config,
        model,
        spectrum,
        trajectory,
        observables,
        info,
        sync,
    })
}

/// Summary of a full-versus-RWA comparison on one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BackendComparison {
    /// Comparison horizon.
    pub t_to: f64,
    /// `max |C_full - C_rwa|` over window starts in `[0, t_to]`.
    pub max_sync_deviation: f64,
    /// `max |discord_full - discord_rwa| / max discord_full` over `[0, t_to]`.
    pub max_discord_deviation: f64,
    /// Pointwise `max |discord_full - discord_rwa| / discord_full` over `[0, t_to]`.
    pub max_pointwise_discord_deviation: f64,
    pub max_mutual_info_deviation: f64,
    pub max_discord_full: f64,
}

/// Compares two runs sampled on the same grid over `[0, t_to]`.
pub fn compare_runs(full: &SimulationOutput, rwa: &SimulationOutput, t_to: f64) -> Result<BackendComparison> {
    if full.info.len() != rwa.info.len() || full.sync.c.len() != rwa.sync.c.len() {
        return Err(Error::GridMismatch("runs have different sample counts".into()));
    }
    let mut max_sync = 0.0f64;
    for ((t, a), b) in full.sync.times.iter().zip(&full.sync.c).zip(&rwa.sync.c) {
        if *t <= t_to + 1e-9 && !a.is_nan() && !b.is_nan() {
            max_sync = max_sync.max((a - b).abs());
        }
    }
    let (mut max_d, mut max_dd, mut max_rel, mut max_i) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (a, b) in full.info.iter().zip(&rwa.info) {
        if a.t > t_to + 1e-9 {
            break;
        }
        let dd = (a.discord - b.discord).abs();
        max_d = max_d.max(a.discord);
        max_dd = max_dd.max(dd);
        if a.discord > 0.0 {
            max_rel = max_rel.max(dd / a.discord);
        }
        max_i = max_i.max((a.mutual_info - b.mutual_info).abs());
    }
    Ok(BackendComparison {
        t_to,
        max_sync_deviation: max_sync,
        max_discord_deviation: if max_d > 0.0 { max_dd / max_d } else { 0.0 },
        max_pointwise_discord_deviation: max_rel,
        max_mutual_info_deviation: max_i,
        max_discord_full: max_d,
    })
}

/// Runs `config` with both backends and compares them over `[0, t_to]`.
pub fn compare_backends(
    config: &RunConfig,
    t_to: f64,
) -> Result<(SimulationOutput, SimulationOutput, BackendComparison)> {
    let full = run_simulation(&RunConfig {
        backend: Backend::Full,
        ..*config
    })?;
    let rwa = run_simulation(&RunConfig {
        backend: Backend::Rwa,
        ..*config
    })?;
    let cmp = compare_runs(&full, &rwa, t_to)?;
    Ok((full, rwa, cmp))
}

/// Analytic decay rate that a dynamical eigenvalue is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RateLabel {
    /// Damping of the lower normal mode.
    GammaMinusMinus,
    /// Mean of the two mode damping rates.
    Average,
    /// Damping of the upper normal mode.
    GammaPlusPlus,
}

/// One eigenvalue next to the closest analytic rate `-Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateComparison {
    pub re: f64,
    pub im: f64,
    pub nearest: RateLabel,
    /// The analytic prediction for `Re(mu)`, i.e. minus the rate.
    pub predicted_re: f64,
    pub absolute_deviation: f64,
    /// `|Re(mu) - predicted| / |predicted|`; absent when the prediction is 0.
    pub relative_deviation: Option<f64>,
}

/// Spectrum together with the analytic rate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EigenReport {
    pub system: SystemParams,
    pub bath: BathParams,
    pub backend: Backend,
    /// Sorted by real part, ascending.
    pub eigenvalues: Vec<crate::dynamics::Eigenvalue>,
    pub ratio: Option<f64>,
    pub dominant_frequency: Option<f64>,
    pub zero_modes: usize,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub rates: RwaRates,
    pub comparison: Vec<RateComparison>,
}

pub fn eigen_report(config: &RunConfig) -> Result<EigenReport> {
    let model = prepare_model(config)?;
    let spectrum = dynamical_eigenvalues(&model.generator)?;
    let r = model.rates;
    let table = [
        (RateLabel::GammaMinusMinus, -r.minus),
        (RateLabel::Average, -r.average),
        (RateLabel::GammaPlusPlus, -r.plus),
    ];
    let comparison = spectrum
        .mu
        .iter()
        .map(|e| {
            let (label, pred) = table
                .iter()
                .copied()
                .min_by(|a, b| (e.re - a.1).abs().total_cmp(&(e.re - b.1).abs()))
                .expect("non-empty table");
            let abs = (e.re - pred).abs();
            RateComparison {
                re: e.re,
                im: e.im,
                nearest: label,
                predicted_re: pred,
                absolute_deviation: abs,
                relative_deviation: (pred != 0.0).then(|| abs / pred.abs()),
            }
        })
        .collect();
    Ok(EigenReport {
        system: config.system,
        bath: config.bath,
        backend: config.backend,
        eigenvalues: spectrum.mu.clone(),
        ratio: spectrum.ratio,
        dominant_frequency: spectrum.dominant_frequency,
        zero_modes: spectrum.zero_modes,
        omega_minus: model.basis.omega_minus,
        omega_plus: model.basis.omega_plus,
        rates: model.rates,
        comparison,
    })
}
