//! Ensemble-averaged Bohmian velocities, the semiclassical `W_cl + W_osc`
//! decomposition, validity windows and the classicality timescales.

mod decomposition;
mod timescales;
mod validity;
mod velocity;

pub use decomposition::{
    semiclassical_decomposition, semiclassical_decomposition_unchecked, sigma_parameters, MInverseParams,
    SemiclassicalDecomposition, SigmaParams,
};
pub use timescales::{cl_sigma1_pcl_squared, timescales, TimescaleReport};
pub use validity::{cl_validity, validity_window, ClValidity, ValidityReport, MARGIN_FACTOR};
pub use velocity::{
    classical_band_margin, density_matrix_velocity, ensemble_velocity, ensemble_velocity_profile, initial_velocity,
    DEFAULT_DENSITY_FLOOR,
};
