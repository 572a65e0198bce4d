//! Windowed synchronization indicator, Gaussian smoothing and onset detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Windows whose variance falls below this yield a NaN gap instead of a value.
pub const MIN_WINDOW_VARIANCE: f64 = 1e-30;
/// Minimum number of sample spacings per correlation window.
pub const MIN_WINDOW_SAMPLES: usize = 10;
/// Gaussian kernels are truncated at this many standard deviations.
pub const KERNEL_TRUNCATION: f64 = 5.0;

/// Relative tolerance for comparing sample times.
const GRID_TOL: f64 = 1e-9;

/// Scalar series on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    /// Validates length, finiteness and uniform spacing.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Domain(format!(
                "series has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::Domain("series needs at least 2 samples".into()));
        }
        if let Some(v) = values.iter().chain(&times).find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("series contains non-finite value {v}")));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        if dt <= 0.0 {
            return Err(Error::Domain("series times must increase".into()));
        }
        for (k, &t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * dt;
            if (t - expected).abs() > GRID_TOL * dt.max(t.abs()) {
                return Err(Error::Domain(format!(
                    "series is not uniformly spaced at sample {k} (t = {t}, expected {expected})"
                )));
            }
        }
        Ok(ObservableSeries { times, values })
    }

    /// Series with samples at `t0 + k dt`.
    pub fn uniform(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|k| t0 + k as f64 * dt).collect();
        Self::new(times, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        (self.times[self.len() - 1] - self.times[0]) / (self.len() - 1) as f64
    }

    /// Index of the sample at time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        index_on_grid(&self.times, t)
    }

    /// Value at grid time `t`.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.index_of(t).map(|i| self.values[i])
    }

    fn same_grid(&self, other: &ObservableSeries) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples vs {} samples",
                self.len(),
                other.len()
            )));
        }
        let scale = self.dt();
        for (k, (a, b)) in self.times.iter().zip(&other.times).enumerate() {
            if (a - b).abs() > GRID_TOL * scale.max(a.abs()) {
                return Err(Error::GridMismatch(format!("sample {k}: t = {a} vs t = {b}")));
            }
        }
        Ok(())
    }
}

fn index_on_grid(times: &[f64], t: f64) -> Option<usize> {
    match times {
        [] => None,
        [only] => ((t - only).abs() <= GRID_TOL * only.abs().max(1.0)).then_some(0),
        [first, .., last] => {
            let dt = (last - first) / (times.len() - 1) as f64;
            let k = ((t - first) / dt).round();
            if k < 0.0 || k as usize >= times.len() {
                return None;
            }
            let k = k as usize;
            ((times[k] - t).abs() <= GRID_TOL * dt.max(t.abs())).then_some(k)
        }
    }
}

/// Indicator `C(t, window)` for each window start `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    /// Window start times.
    pub times: Vec<f64>,
    /// Indicator values; NaN marks windows with vanishing variance.
    pub c: Vec<f64>,
    /// Window length.
    pub window: f64,
}

impl SyncResult {
    pub fn value_at(&self, t: f64) -> Option<f64> {
        index_on_grid(&self.times, t).map(|i| self.c[i])
    }

    /// Largest `|C|` over window starts in `[t_from, t_to]`, ignoring gaps.
    pub fn max_abs_in(&self, t_from: f64, t_to: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.c)
            .filter(|(t, c)| **t >= t_from && **t <= t_to && !c.is_nan())
            .map(|(_, c)| c.abs())
            .reduce(f64::max)
    }
}

/// Number of sample spacings in a window of length `window`.
pub fn window_samples(window: f64, dt: f64) -> Result<usize> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::Domain(format!("window must be > 0, got {window}")));
    }
    let k = (window / dt).round();
    if k < MIN_WINDOW_SAMPLES as f64 {
        return Err(Error::Domain(format!(
            "window {window} spans fewer than {MIN_WINDOW_SAMPLES} sample spacings of {dt}"
        )));
    }
    Ok(k as usize)
}

/// Pearson correlation over samples `f[0..=k]`, `g[0..=k]` with trapezoid weights.
fn window_correlation(f: &[f64], g: &[f64]) -> f64 {
    let k = f.len() - 1;
    let weight = |i: usize| if i == 0 || i == k { 0.5 } else { 1.0 };
    let norm = k as f64;
    let (mut mf, mut mg) = (0.0, 0.0);
    for i in 0..=k {
        mf += weight(i) * f[i];
        mg += weight(i) * g[i];
    }
    mf /= norm;
    mg /= norm;
    let (mut cfg, mut vf, mut vg) = (0.0, 0.0, 0.0);
    for i in 0..=k {
        let (df, dg) = (f[i] - mf, g[i] - mg);
        cfg += weight(i) * df * dg;
        vf += weight(i) * df * df;
        vg += weight(i) * dg * dg;
    }
    let (cfg, vf, vg) = (cfg / norm, vf / norm, vg / norm);
    if vf < MIN_WINDOW_VARIANCE || vg < MIN_WINDOW_VARIANCE {
        return f64::NAN;
    }
    (cfg / (vf.sqrt() * vg.sqrt())).clamp(-1.0, 1.0)
}

/// Windowed Pearson correlation of `f` and `g` over `[t, t + window]` for
/// every window that fits in the series.
///
/// The window is rounded to a whole number of sample spacings.
pub fn windowed_correlation(f: &ObservableSeries, g: &ObservableSeries, window: f64) -> Result<SyncResult> {
    f.same_grid(g)?;
    let k = window_samples(window, f.dt())?;
    let n = f.len();
    let count = n.saturating_sub(k);
    let c = (0..count)
        .map(|i| window_correlation(&f.values[i..=i + k], &g.values[i..=i + k]))
        .collect();
    Ok(SyncResult {
        times: f.times[..count].to_vec(),
        c,
        window,
    })
}

/// Maps an out-of-range index onto `0..n` by half-sample mirroring
/// (`d c b a | a b c d | d c b a`).
fn reflect(index: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = index.rem_euclid(period) as usize;
    if m >= n {
        2 * n - 1 - m
    } else {
        m
    }
}

/// Convolution with a normalized Gaussian of standard deviation `width`
/// (time units), truncated at [`KERNEL_TRUNCATION`] widths, mirroring the
/// series at both ends.
pub fn gaussian_smooth(series: &ObservableSeries, width: f64) -> Result<ObservableSeries> {
    let dt = series.dt();
    if !(width.is_finite() && width > dt) {
        return Err(Error::Domain(format!(
            "filter width must exceed the sample spacing {dt}, got {width}"
        )));
    }
    let sigma = width / dt;
    let radius = (KERNEL_TRUNCATION * sigma + 0.5) as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|j| (-0.5 * (j as f64 / sigma).powi(2)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= total);

    let n = series.len();
    let v = &series.values;
    let values = (0..n)
        .map(|i| {
            // Accumulate deviations from the centre sample so constant
            // series come back bit-for-bit.
            let centre = v[i];
            let acc: f64 = kernel
                .iter()
                .enumerate()
                .map(|(j, w)| w * (v[reflect(i as isize + j as isize - radius, n)] - centre))
                .sum();
            centre + acc
        })
        .collect();
    Ok(ObservableSeries {
        times: series.times.clone(),
        values,
    })
}

/// Earliest window start after which every window has `|C| >= threshold`.
/// Gaps (NaN) count as below threshold.
pub fn sync_onset(result: &SyncResult, threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!(
            "onset threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let below = |c: &f64| c.is_nan() || c.abs() < threshold;
    Ok(match result.c.iter().rposition(below) {
        None => result.times.first().copied(),
        Some(last) => result.times.get(last + 1).copied(),
    })
}
