//! Simulation and analysis of two detuned, dissipatively coupled quantum
//! harmonic oscillators: Gaussian moment dynamics, decay-rate spectra,
//! synchronization indicators and Gaussian correlation measures.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod info;
pub mod io;
pub mod model;
pub mod simulate;
pub mod sweep;
pub mod sync;

pub use dynamics::Backend;
pub use error::{Error, Result};
pub use info::{InitialStateSpec, MeasuredParty};
pub use model::{BathParams, SystemParams, Topology};
pub use simulate::{compare_backends, eigen_report, run_simulation, RunConfig, SimulationOutput};
pub use sweep::{run_sweep, Execution, Metric, SweepGrid, SweepResult};
