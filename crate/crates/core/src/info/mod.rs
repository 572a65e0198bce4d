//! Lab-frame covariances, initial states and Gaussian information measures.

mod covariance;
mod measures;

pub use covariance::{
    from_lab_covariance, make_initial, to_lab_covariance, CovarianceMatrix, InitialStateSpec, MAX_SQUEEZING,
};
pub use measures::{
    entropy, gaussian_discord, gaussian_discord_on, info_record, log_negativity, mutual_information,
    symplectic_eigenvalues_closed_form, symplectic_spectrum, BlockInvariants, InfoRecord, MeasuredParty,
    SymplecticSpectrum, PHYSICALITY_TOL,
};
