//! Explicit oscillator bath: exact and weak-coupling transfer blocks, the
//! reduced propagator, coherent-state bath samples and the bath-conditional
//! velocity.

mod classicality;
mod conditional;
mod gkernel;
mod kernels;
mod matrices;
mod sampling;
mod spectral;

pub use classicality::{
    bimodality_run, classicality_report, m_tilde_log_asymptote, minv_leading_log, sigma3_log_asymptote,
    solve_t_tilde_c, AsymptoteForm, BimodalityConfig, BimodalityReport, ClassicalityReport, SliceOutcome,
    TTildeSolution, EULER_GAMMA, M_TILDE_CONSTANTS,
};
pub use conditional::{
    conditional_kernel, conditional_m_tilde, conditional_velocity, conditional_velocity_unchecked, sample_slice,
    sigma3_squared, ConditionalKernel, ConditionalOptions, ConditionalVelocity, OSC_INCLUSION_RATIO,
};
pub use gkernel::{solve_g_kernel, GTable, POINTS_PER_PERIOD};
pub use kernels::{sine_convolution, sine_convolution_ddot, sine_convolution_dot};
pub use matrices::{
    auxiliary_residuals, coupling_strength, d_inverse, exact_bath_matrices, reduced_m_from_bath,
    reversibility_residuals, symplectic_residual, weak_coupling_matrices, weak_h, BathPropagators, BlockSet,
    DCorrection, PropagatorMode, DENSE_D_LIMIT,
};
pub use sampling::{p_function_variances, sample_bath, task_seed, CoherentBathSample};
pub use spectral::{discretize_spectral_density, BathOscillator, BathSpec, DiscretizationStrategy, SpectralDensity};
