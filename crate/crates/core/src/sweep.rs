//! Parameter grids over `(omega2, lambda)` evaluated at a fixed time.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dynamics::{dynamical_eigenvalues, sample_trajectory};
use crate::error::{Error, Result};
use crate::info::make_initial;
use crate::simulate::{lab_observables, prepare_model, sample_info, RunConfig};
use crate::sync::windowed_correlation;

/// Quantities a sweep can evaluate per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "syncAbs")]
    SyncAbs,
    #[serde(rename = "discord")]
    Discord,
    #[serde(rename = "mutualInfo")]
    MutualInfo,
    #[serde(rename = "eigRatio")]
    EigRatio,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::SyncAbs,
        Metric::Discord,
        Metric::MutualInfo,
        Metric::EigRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::SyncAbs => "syncAbs",
            Metric::Discord => "discord",
            Metric::MutualInfo => "mutualInfo",
            Metric::EigRatio => "eigRatio",
        }
    }

    /// Whether evaluating the metric requires propagating a trajectory.
    pub fn needs_trajectory(&self) -> bool {
        !matches!(self, Metric::EigRatio)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown metric {s:?}; expected syncAbs, discord, mutualInfo or eigRatio"
                ))
            })
    }
}

/// Inclusive arithmetic range `start, start + step, ..., <= stop`.
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(Error::Domain(format!(
            "invalid range {start}..{stop} step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Grid definition; every other parameter comes from the template run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepGrid {
    pub omega2_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub t_eval: f64,
    pub metrics: Vec<Metric>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            omega2_values: linspace_step(1.0, 1.5, 0.025).expect("static range"),
            lambda_values: linspace_step(0.05, 0.9, 0.025).expect("static range"),
            t_eval: 300.0,
            metrics: Metric::ALL.to_vec(),
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.omega2_values.is_empty() || self.lambda_values.is_empty() {
            return Err(Error::Domain(
                "sweep grid must have at least one omega2 and one lambda".into(),
            ));
        }
        if let Some(v) = self
            .omega2_values
            .iter()
            .chain(&self.lambda_values)
            .find(|v| !v.is_finite())
        {
            return Err(Error::Domain(format!("sweep grid contains non-finite value {v}")));
        }
        if !(self.t_eval.is_finite() && self.t_eval >= 0.0) {
            return Err(Error::Domain(format!("t_eval must be >= 0, got {}", self.t_eval)));
        }
        if self.metrics.is_empty() {
            return Err(Error::Domain("sweep needs at least one metric".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.omega2_values.len() * self.lambda_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(omega2, lambda)` of cell `index`; lambda varies fastest.
    pub fn cell_params(&self, index: usize) -> (f64, f64) {
        let nl = self.lambda_values.len();
        (self.omega2_values[index / nl], self.lambda_values[index % nl])
    }

    fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }
}

/// Outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Parameters outside the model domain (e.g. `|lambda| >= omega1 omega2`).
    Skipped(String),
    /// The cell failed numerically or produced an unphysical state.
    Error(String),
}

impl CellStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Skipped(_) => "skipped",
            CellStatus::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepCell {
    pub omega2: f64,
    pub lambda: f64,
    pub sync_abs: Option<f64>,
    pub discord: Option<f64>,
    pub mutual_info: Option<f64>,
    pub eig_ratio: Option<f64>,
    #[serde(flatten)]
    pub status: CellStatus,
}

impl SweepCell {
    fn empty(omega2: f64, lambda: f64, status: CellStatus) -> Self {
        SweepCell {
            omega2,
            lambda,
            sync_abs: None,
            discord: None,
            mutual_info: None,
            eig_ratio: None,
            status,
        }
    }

    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::SyncAbs => self.sync_abs,
            Metric::Discord => self.discord,
            Metric::MutualInfo => self.mutual_info,
            Metric::EigRatio => self.eig_ratio,
        }
    }
}

/// Configuration snapshot stored alongside sweep results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepProvenance {
    pub version: String,
    pub template: RunConfig,
    pub grid: SweepGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub provenance: SweepProvenance,
}

impl SweepResult {
    pub fn cell(&self, i_omega2: usize, i_lambda: usize) -> &SweepCell {
        &self.cells[i_omega2 * self.provenance.grid.lambda_values.len() + i_lambda]
    }
}

/// How sweep cells are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// One worker per core.
    #[default]
    Parallel,
    /// Worker pool of the given size.
    ParallelWith(usize),
}

/// Evaluates one cell; never fails, errors end up in the status.
pub fn evaluate_cell(template: &RunConfig, grid: &SweepGrid, omega2: f64, lambda: f64) -> SweepCell {
    let mut config = *template;
    config.system.omega2 = omega2;
    config.system.lambda = lambda;
    if let Err(e) = config.system.validate() {
        return SweepCell::empty(omega2, lambda, CellStatus::Skipped(e.to_string()));
    }
    match cell_metrics(&config, grid) {
        Ok(mut cell) => {
            cell.omega2 = omega2;
            cell.lambda = lambda;
            cell
        }
        Err(e) if e.is_validation() => SweepCell::empty(omega2, lambda, CellStatus::Skipped(e.to_string())),
        Err(e) => SweepCell::empty(omega2, lambda, CellStatus::Error(e.to_string())),
    }
}

fn cell_metrics(config: &RunConfig, grid: &SweepGrid) -> Result<SweepCell> {
    let model = prepare_model(&RunConfig {
        // prepare_model validates t_max; the cell horizon is fixed below
        t_max: config.t_max.max(config.dt_out),
        ..*config
    })?;
    let mut cell = SweepCell::empty(config.system.omega2, config.system.lambda, CellStatus::Ok);
    if grid.wants(Metric::EigRatio) {
        let spectrum = dynamical_eigenvalues(&model.generator)?;
        cell.eig_ratio = spectrum.ratio;
    }
    if !grid.metrics.iter().any(Metric::needs_trajectory) {
        return Ok(cell);
    }

    // Same sampling as a direct run, cut at the end of the window at t_eval.
    let initial = make_initial(&config.initial, &config.system, &model.basis)?;
    let horizon = grid.t_eval + config.window;
    let trajectory = sample_trajectory(&model.generator, &initial, horizon, config.dt_out)?;
    let obs = lab_observables(config, &model.basis, &trajectory.samples)?;
    let i_eval = obs.x1_sq.index_of(grid.t_eval).ok_or_else(|| {
        Error::Domain(format!(
            "t_eval = {} is not on the output grid of spacing {}",
            grid.t_eval, config.dt_out
        ))
    })?;
    let record = sample_info(config, &model.basis, &trajectory.samples[i_eval])?;
    if grid.wants(Metric::Discord) {
        cell.discord = Some(record.discord);
    }
    if grid.wants(Metric::MutualInfo) {
        cell.mutual_info = Some(record.mutual_info);
    }
    if grid.wants(Metric::SyncAbs) {
        let slice = |s: &crate::sync::ObservableSeries| crate::sync::ObservableSeries {
            times: s.times[i_eval..].to_vec(),
            values: s.values[i_eval..].to_vec(),
        };
        let sync = windowed_correlation(&slice(&obs.x1_sq), &slice(&obs.x2_sq), config.window)?;
        cell.sync_abs = sync.c.first().map(|c| c.abs());
        if cell.sync_abs.is_none() {
            return Err(Error::Domain(format!(
                "window {} does not fit after t_eval = {}",
                config.window, grid.t_eval
            )));
        }
    }
    Ok(cell)
}

/// Evaluates every cell of `grid` around `template`.
///
/// Cells are independent; the result vector is ordered by cell index
/// (lambda fastest) regardless of scheduling.
pub fn run_sweep(template: &RunConfig, grid: &SweepGrid, execution: Execution) -> Result<SweepResult> {
    grid.validate()?;
    let eval = |i: usize| {
        let (w2, l) = grid.cell_params(i);
        evaluate_cell(template, grid, w2, l)
    };
    let cells = run_cells(grid.len(), execution, eval)?;
    Ok(SweepResult {
        cells,
        provenance: SweepProvenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            template: *template,
            grid: grid.clone(),
        },
    })
}

#[cfg(feature = "parallel")]
fn run_cells<F>(n: usize, execution: Execution, eval: F) -> Result<Vec<SweepCell>>
where
    F: Fn(usize) -> SweepCell + Sync + Send,
{
    use rayon::prelude::*;
    let threads = match execution {
        Execution::Sequential => return Ok((0..n).map(eval).collect()),
        Execution::Parallel => 0,
        Execution::ParallelWith(t) => t,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(eval).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_cells<F>(n: usize, execution: Execution, eval: F) -> Result<Vec<SweepCell>>
where
    F: Fn(usize) -> SweepCell,
{
    if execution != Execution::Sequential {
        log::debug!("built without the `parallel` feature; running sweep sequentially");
    }
    Ok((0..n).map(eval).collect())
}
