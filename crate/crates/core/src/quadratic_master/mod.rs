//! Quadratic master equations in the Wigner representation: coefficient
//! assembly, the Gaussian propagator `(A, M)`, field propagation, a
//! finite-difference oracle and decoherence diagnostics.

mod coefficients;
mod convolve;
mod decoherence;
mod pde;
mod propagator;
mod spectral;
mod threshold;

pub use coefficients::{assemble_cl_coefficients, CaldeiraLeggettParams, Coefficient, MasterEqCoefficients};
pub use convolve::{propagate_wigner, propagate_wigner_onto, KernelMode, Propagated};
pub use decoherence::{density_matrix_element, position_decoherence_factor};
pub use pde::{pde_oracle_evolve, PdeOptions};
pub use propagator::{
    cl_short_time_m, free_oscillator_a, integrate_propagator, integrate_propagator_at, GaussianPropagator,
    DEFAULT_TOLERANCE,
};
pub use spectral::propagate_band_state;
pub use threshold::{nonnegativity_threshold, Threshold};
