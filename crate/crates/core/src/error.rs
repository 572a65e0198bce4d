use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is internally inconsistent or outside the validity of a backend.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed (non-convergence, overflow, singular solve).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The generator has eigenvalues with non-negative real part.
    #[error("no unique steady state: generator has {zero_modes} eigenvalue(s) with Re >= -1e-12")]
    NoUniqueSteadyState { zero_modes: usize },

    /// A covariance matrix violates the uncertainty principle beyond tolerance.
    #[error("unphysical state: symplectic eigenvalue {nu} < 1")]
    UnphysicalState { nu: f64 },

    /// The measured mode is pure but still correlated with the other one.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Two series do not share the same time grid.
    #[error("time grids differ: {0}")]
    GridMismatch(String),
}

impl Error {
    /// True for errors caused by invalid user input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Config(_) | Error::GridMismatch(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
