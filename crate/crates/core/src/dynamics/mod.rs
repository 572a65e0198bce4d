//! Moment-space dynamics: generators, spectra and propagation.

mod generator;
mod moments;
mod propagate;
mod spectrum;

pub use generator::{build_generator, Backend, DriftMatrix, MomentGenerator};
pub use moments::*;
pub use propagate::{
    propagate_exact, propagate_stepwise, sample_trajectory, steady_state, Propagator, Trajectory,
};
pub use spectrum::{dynamical_eigenvalues, Eigenvalue, Spectrum, ZERO_MODE_TOL};
