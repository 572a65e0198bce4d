//! Deterministic CSV and JSON serialization of run, spectrum and sweep data.
//!
//! Floats are written with 17 significant digits in scientific notation, so
//! they round-trip exactly and identical inputs give byte-identical files.
//! Every CSV starts with a `#` line describing units, then a header row.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Eigenvalue, FIRST_MOMENT_NAMES, SECOND_MOMENT_NAMES};
use crate::info::InfoRecord;
use crate::model::{DissipationCoefficients, NormalModeBasis, RwaRates};
use crate::simulate::{RunConfig, SimulationOutput};
use crate::sweep::SweepResult;
use crate::sync::SyncResult;

/// Formats a float with 17 significant digits; NaN becomes an empty field.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_row<W: Write>(w: &mut W, fields: impl IntoIterator<Item = String>) -> io::Result<()> {
    let line: Vec<String> = fields.into_iter().collect();
    writeln!(w, "{}", line.join(","))
}

/// Trajectory: `t`, the ten second moments, the four first moments, then
/// `<x1^2>` and `<x2^2>` in shot-noise units.
pub fn write_trajectory_csv<W: Write>(w: &mut W, out: &SimulationOutput) -> io::Result<()> {
    writeln!(
        w,
        "# units: t in 1/omega1; normal-mode moments in natural units (hbar = 1, unit masses), \
         *_ac = anticommutator <{{X,P}}>; x1sqOverS, x2sqOverS = <x_i^2> over the vacuum value"
    )?;
    let header = std::iter::once("t")
        .chain(SECOND_MOMENT_NAMES)
        .chain(FIRST_MOMENT_NAMES)
        .chain(["x1sqOverS", "x2sqOverS"])
        .map(String::from);
    write_row(w, header)?;
    let obs = &out.observables;
    for (k, s) in out.trajectory.samples.iter().enumerate() {
        let row = std::iter::once(s.time)
            .chain(s.second.iter().copied())
            .chain(s.first.iter().copied())
            .chain([obs.x1_sq.values[k], obs.x2_sq.values[k]])
            .map(fmt_f64);
        write_row(w, row)?;
    }
    Ok(())
}

/// Information measures: `t, mutualInfo, discord, logNegativity, nuMin`.
pub fn write_info_csv<W: Write>(w: &mut W, info: &[InfoRecord]) -> io::Result<()> {
    writeln!(
        w,
        "# units: t in 1/omega1; mutualInfo, discord, logNegativity in nats; nuMin dimensionless (shot-noise units)"
    )?;
    writeln!(w, "t,mutualInfo,discord,logNegativity,nuMin")?;
    for r in info {
        write_row(
            w,
            [r.t, r.mutual_info, r.discord, r.log_negativity, r.nu_min].map(fmt_f64),
        )?;
    }
    Ok(())
}

/// Synchronization indicator: `t, C`; NaN gaps are empty fields.
pub fn write_sync_csv<W: Write>(w: &mut W, sync: &SyncResult) -> io::Result<()> {
    writeln!(
        w,
        "# units: t = window start in 1/omega1; C dimensionless in [-1, 1]; window = {}",
        fmt_f64(sync.window)
    )?;
    writeln!(w, "t,C")?;
    for (t, c) in sync.times.iter().zip(&sync.c) {
        write_row(w, [fmt_f64(*t), fmt_f64(*c)])?;
    }
    Ok(())
}

/// Sweep cells: `omega2, lambda, syncAbs, discord, mutualInfo, eigRatio, status`.
/// Metrics that were not requested or not computed are empty.
pub fn write_sweep_csv<W: Write>(w: &mut W, result: &SweepResult) -> io::Result<()> {
    writeln!(
        w,
        "# units: omega2 in omega1, lambda in omega1^2; syncAbs = |C| at tEval = {}; discord, mutualInfo in nats; eigRatio dimensionless",
        fmt_f64(result.provenance.grid.t_eval)
    )?;
    writeln!(w, "omega2,lambda,syncAbs,discord,mutualInfo,eigRatio,status")?;
    for c in &result.cells {
        write_row(
            w,
            [
                fmt_f64(c.omega2),
                fmt_f64(c.lambda),
                fmt_opt(c.sync_abs),
                fmt_opt(c.discord),
                fmt_opt(c.mutual_info),
                fmt_opt(c.eig_ratio),
                c.status.label().to_string(),
            ],
        )?;
    }
    Ok(())
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(w: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
    writeln!(w)
}

/// Everything needed to reproduce the numbers in a run's output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub basis: NormalModeBasis,
    pub coefficients: DissipationCoefficients,
    pub rates: RwaRates,
    pub eigenvalues: Vec<Eigenvalue>,
    pub eigenvalue_ratio: Option<f64>,
    pub dominant_frequency: Option<f64>,
    pub samples: usize,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(out: &SimulationOutput, files: Vec<String>) -> Self {
        RunManifest {
            tool: "oscsync".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: out.config,
            basis: out.model.basis,
            coefficients: out.model.coefficients,
            rates: out.model.rates,
            eigenvalues: out.spectrum.mu.clone(),
            eigenvalue_ratio: out.spectrum.ratio,
            dominant_frequency: out.spectrum.dominant_frequency,
            samples: out.trajectory.len(),
            files,
        }
    }
}
