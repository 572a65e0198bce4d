//! Command-line front end: argument and config-file parsing, subcommand
//! dispatch and output files.
//!
//! Settings are resolved in three layers: built-in defaults, then a flat
//! `key = value` config file (`--config`), then command-line flags.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use oscsync_core::io::{
    write_info_csv, write_json, write_sweep_csv, write_sync_csv, write_trajectory_csv, RunManifest,
};
use oscsync_core::simulate::BackendComparison;
use oscsync_core::sweep::linspace_step;
use oscsync_core::{
    compare_backends, eigen_report, run_simulation, run_sweep, Backend, Error, Execution, InitialStateSpec,
    MeasuredParty, Metric, RunConfig, SweepGrid, Topology,
};

/// Exit code for invalid input (flags, config file, parameter domain).
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code for file-system failures.
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flag or config-file content.
    Validation(String),
    /// Error raised by the simulation library.
    Core(Error),
    /// Reading or writing a file failed.
    Io { path: PathBuf, source: io::Error },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid input: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "oscsync",
    version,
    about = "Synchronization and quantum correlations of two dissipatively coupled oscillators",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one configuration and write trajectory, information,
    /// synchronization and manifest files.
    Simulate(RunArgs),
    /// Write the dynamical eigenvalues and the analytic rate comparison.
    Eigen(RunArgs),
    /// Evaluate metrics over an (omega2, lambda) grid.
    Sweep(SweepArgs),
    /// Run both backends on one configuration and report their deviation.
    CompareRwa(CompareArgs),
}

/// Parameters shared by every subcommand. Unset flags fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// System-bath coupling.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Lorentz-Drude cutoff frequency.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Bath topology: common or separate.
    #[arg(long, value_name = "common|separate")]
    pub bath: Option<Topology>,
    /// Initial state: vacuum, tms:R or sq:R1:R2.
    #[arg(long, value_name = "SPEC")]
    pub initial: Option<InitialStateSpec>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Output sample spacing.
    #[arg(long)]
    pub dt_out: Option<f64>,
    /// Synchronization window length.
    #[arg(long)]
    pub window: Option<f64>,
    /// Gaussian filter width used for smoothed summaries.
    #[arg(long)]
    pub filter_width: Option<f64>,
    /// Moment equations: full or rwa.
    #[arg(long, value_name = "full|rwa")]
    pub backend: Option<Backend>,
    /// Oscillator measured by the discord: first or second.
    #[arg(long, value_name = "first|second")]
    pub measure: Option<MeasuredParty>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// omega2 values as START:STOP:STEP (inclusive).
    #[arg(long, value_name = "START:STOP:STEP")]
    pub omega2_range: Option<String>,
    /// lambda values as START:STOP:STEP (inclusive).
    #[arg(long, value_name = "START:STOP:STEP")]
    pub lambda_range: Option<String>,
    /// Evaluation time of the cell metrics.
    #[arg(long)]
    pub t_eval: Option<f64>,
    /// Comma-separated subset of syncAbs,discord,mutualInfo,eigRatio.
    #[arg(long, value_name = "LIST")]
    pub metrics: Option<String>,
    /// Number of sweep workers (1 runs sequentially).
    #[arg(long, env = "OSCSYNC_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// End of the comparison interval (defaults to min(300, t_max)).
    #[arg(long)]
    pub t_compare: Option<f64>,
}

/// Values read from a config file, all optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSettings {
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub cutoff: Option<f64>,
    pub temperature: Option<f64>,
    pub bath: Option<Topology>,
    pub initial: Option<InitialStateSpec>,
    pub t_max: Option<f64>,
    pub dt_out: Option<f64>,
    pub window: Option<f64>,
    pub filter_width: Option<f64>,
    pub backend: Option<Backend>,
    pub measure: Option<MeasuredParty>,
    pub out: Option<PathBuf>,
    pub omega2_range: Option<String>,
    pub lambda_range: Option<String>,
    pub t_eval: Option<f64>,
    pub metrics: Option<String>,
    pub t_compare: Option<f64>,
}

fn parse_value<T: FromStr>(origin: &str, key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Validation(format!("{origin}: invalid value {value:?} for {key}: {e}")))
}

impl FileSettings {
    /// Parses `key = value` lines. `#` starts a comment; keys may use `-` or `_`.
    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut s = FileSettings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = format!("{source}:{}", n + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{origin}: expected key = value, got {line:?}"))
            })?;
            let key = key.trim().replace('-', "_").to_ascii_lowercase();
            let value = value.trim().trim_matches('"');
            macro_rules! set {
                ($field:ident) => {
                    s.$field = Some(parse_value(&origin, &key, value)?)
                };
            }
            match key.as_str() {
                "omega1" => set!(omega1),
                "omega2" => set!(omega2),
                "lambda" => set!(lambda),
                "gamma" => set!(gamma),
                "cutoff" => set!(cutoff),
                "temperature" => set!(temperature),
                "bath" => set!(bath),
                "initial" => set!(initial),
                "t_max" => set!(t_max),
                "dt_out" => set!(dt_out),
                "window" => set!(window),
                "filter_width" => set!(filter_width),
                "backend" => set!(backend),
                "measure" => set!(measure),
                "out" => s.out = Some(PathBuf::from(value)),
                "omega2_range" => s.omega2_range = Some(value.to_string()),
                "lambda_range" => s.lambda_range = Some(value.to_string()),
                "t_eval" => set!(t_eval),
                "metrics" => s.metrics = Some(value.to_string()),
                "t_compare" => set!(t_compare),
                other => {
                    return Err(CliError::Validation(format!("{origin}: unknown key {other:?}")));
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Settings after merging defaults, config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: RunConfig,
    pub out: PathBuf,
    pub file: FileSettings,
}

pub const DEFAULT_OUT_DIR: &str = "oscsync-out";

pub fn resolve(args: &RunArgs) -> CliResult<Resolved> {
    let file = match &args.config {
        Some(p) => FileSettings::load(p)?,
        None => FileSettings::default(),
    };
    let mut c = RunConfig::default();
    macro_rules! pick {
        ($target:expr, $field:ident) => {
            if let Some(v) = args.$field.clone().or(file.$field.clone()) {
                $target = v;
            }
        };
    }
    pick!(c.system.omega1, omega1);
    pick!(c.system.omega2, omega2);
    pick!(c.system.lambda, lambda);
    pick!(c.bath.gamma, gamma);
    pick!(c.bath.cutoff, cutoff);
    pick!(c.bath.temperature, temperature);
    pick!(c.bath.topology, bath);
    pick!(c.initial, initial);
    pick!(c.t_max, t_max);
    pick!(c.dt_out, dt_out);
    pick!(c.window, window);
    pick!(c.filter_width, filter_width);
    pick!(c.backend, backend);
    pick!(c.measured, measure);
    let out = args
        .out
        .clone()
        .or(file.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    c.validate()?;
    Ok(Resolved { config: c, out, file })
}

fn parse_range(text: &str, name: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let bad = || CliError::Validation(format!("{name} must be START:STOP:STEP, got {text:?}"));
    match parts.as_slice() {
        [single] => Ok(vec![single.parse().map_err(|_| bad())?]),
        [a, b, step] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            let step: f64 = step.parse().map_err(|_| bad())?;
            linspace_step(a, b, step).map_err(|e| CliError::Validation(format!("{name}: {e}")))
        }
        _ => Err(bad()),
    }
}

fn parse_metrics(text: &str) -> CliResult<Vec<Metric>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Metric = item.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Validation("metrics list is empty".into()));
    }
    Ok(out)
}

pub fn resolve_grid(args: &SweepArgs, file: &FileSettings) -> CliResult<SweepGrid> {
    let mut grid = SweepGrid::default();
    if let Some(r) = args.omega2_range.as_ref().or(file.omega2_range.as_ref()) {
        grid.omega2_values = parse_range(r, "omega2-range")?;
    }
    if let Some(r) = args.lambda_range.as_ref().or(file.lambda_range.as_ref()) {
        grid.lambda_values = parse_range(r, "lambda-range")?;
    }
    if let Some(t) = args.t_eval.or(file.t_eval) {
        grid.t_eval = t;
    }
    if let Some(m) = args.metrics.as_ref().or(file.metrics.as_ref()) {
        grid.metrics = parse_metrics(m)?;
    }
    grid.validate()?;
    Ok(grid)
}

fn execution_for(threads: Option<usize>) -> CliResult<Execution> {
    match threads {
        None => Ok(Execution::Parallel),
        Some(0) => Err(CliError::Validation("thread count must be >= 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => Ok(Execution::ParallelWith(n)),
    }
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes `path` through `body`, attaching the path to any IO error.
fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn cmd_simulate(args: &RunArgs, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    let r = resolve(args)?;
    let out = run_simulation(&r.config)?;
    create_dir(&r.out)?;
    let names = ["trajectory.csv", "info.csv", "sync.csv", "manifest.json"];
    let paths: Vec<PathBuf> = names.iter().map(|n| r.out.join(n)).collect();
    write_file(&paths[0], |w| write_trajectory_csv(w, &out))?;
    write_file(&paths[1], |w| write_info_csv(w, &out.info))?;
    write_file(&paths[2], |w| write_sync_csv(w, &out.sync))?;
    let manifest = RunManifest::new(&out, names.iter().map(|s| s.to_string()).collect());
    write_file(&paths[3], |w| write_json(w, &manifest))?;

    let last_c = out.sync.c.iter().rev().find(|c| !c.is_nan()).copied();
    let min_nu = out.info.iter().map(|r| r.nu_min).fold(f64::INFINITY, f64::min);
    let mut report = || -> io::Result<()> {
        writeln!(
            stdout,
            "wrote {} samples to {}",
            out.trajectory.len(),
            r.out.display()
        )?;
        if let (Some(t), Some(c)) = (out.sync.times.last(), last_c) {
            writeln!(stdout, "C(t = {t}, window = {}) = {c:.6}", r.config.window)?;
        }
        writeln!(stdout, "min symplectic eigenvalue = {min_nu:.12}")
    };
    report().map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(paths)
}

pub fn cmd_eigen(args: &RunArgs, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    let r = resolve(args)?;
    let report = eigen_report(&r.config)?;
    create_dir(&r.out)?;
    let path = r.out.join("spectrum.json");
    write_file(&path, |w| write_json(w, &report))?;
    let mut text = || -> io::Result<()> {
        for e in &report.eigenvalues {
            writeln!(stdout, "{:+.10e} {:+.10e}i", e.re, e.im)?;
        }
        match report.ratio {
            Some(ratio) => writeln!(stdout, "ratio = {ratio:.6}")?,
            None => writeln!(stdout, "ratio = n/a")?,
        }
        if report.zero_modes > 0 {
            writeln!(stdout, "undamped modes: {}", report.zero_modes)?;
        }
        Ok(())
    };
    text().map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(vec![path])
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    let r = resolve(&args.run)?;
    let grid = resolve_grid(args, &r.file)?;
    let execution = execution_for(args.threads)?;
    let result = run_sweep(&r.config, &grid, execution)?;
    create_dir(&r.out)?;
    let csv = r.out.join("sweep.csv");
    let json = r.out.join("sweep.json");
    write_file(&csv, |w| write_sweep_csv(w, &result))?;
    write_file(&json, |w| write_json(w, &result))?;
    let ok = result.cells.iter().filter(|c| c.status.label() == "ok").count();
    writeln!(
        stdout,
        "{} cells ({ok} ok) written to {}",
        result.cells.len(),
        csv.display()
    )
    .map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(vec![csv, json])
}

pub fn cmd_compare_rwa(args: &CompareArgs, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    let r = resolve(&args.run)?;
    let t_to = args
        .t_compare
        .or(r.file.t_compare)
        .unwrap_or_else(|| r.config.t_max.min(300.0));
    if !(t_to.is_finite() && t_to > 0.0) {
        return Err(CliError::Validation(format!("t-compare must be > 0, got {t_to}")));
    }
    let (full, rwa, cmp): (_, _, BackendComparison) = compare_backends(&r.config, t_to)?;
    create_dir(&r.out)?;
    let paths: Vec<PathBuf> = [
        "info_full.csv",
        "info_rwa.csv",
        "sync_full.csv",
        "sync_rwa.csv",
        "comparison.json",
    ]
    .iter()
    .map(|n| r.out.join(n))
    .collect();
    write_file(&paths[0], |w| write_info_csv(w, &full.info))?;
    write_file(&paths[1], |w| write_info_csv(w, &rwa.info))?;
    write_file(&paths[2], |w| write_sync_csv(w, &full.sync))?;
    write_file(&paths[3], |w| write_sync_csv(w, &rwa.sync))?;
    write_file(&paths[4], |w| write_json(w, &cmp))?;
    let mut text = || -> io::Result<()> {
        writeln!(stdout, "comparison over [0, {t_to}]")?;
        writeln!(
            stdout,
            "max |C_full - C_rwa|                     = {:.6e}",
            cmp.max_sync_deviation
        )?;
        writeln!(
            stdout,
            "max |d_full - d_rwa| / max d_full        = {:.6e}",
            cmp.max_discord_deviation
        )?;
        writeln!(
            stdout,
            "max |d_full - d_rwa| / d_full (pointwise) = {:.6e}",
            cmp.max_pointwise_discord_deviation
        )
    };
    text().map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(paths)
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Eigen(a) => cmd_eigen(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::CompareRwa(a) => cmd_compare_rwa(a, stdout),
    }
}
