//! System states (exact and WKB), classical orbit quantities and Wigner
//! transforms, with independent closed-form oracles.

mod eigen;
mod grid;
mod orbit;
mod state;
mod system;
mod wigner;
mod wkb;

pub use eigen::{eigenfunction_exact, eigenfunctions_exact, exact_oscillator_wigner, momentum_amplitude};
pub(crate) use grid::stencil as grid_stencil;
pub use grid::{GridSpec, WignerField};
pub use orbit::{classical_orbit, ClassicalOrbit};
pub use state::{build_energy_band_state, CoefficientSpec, EnergyBandState};
pub use system::OscillatorSystemSpec;
pub use wigner::{wigner_transform, WignerTransformOptions};
pub use wkb::{wkb_amplitudes, wkb_wavefunction, WkbAmplitudes, DEFAULT_TURNING_WINDOW};
