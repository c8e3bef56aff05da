//! Quantum Brownian motion in phase space: Gaussian Wigner propagation,
//! semiclassical band-state decomposition, ensemble and conditional Bohmian
//! velocities, and the timescales that govern classicality.
//!
//! All quantities carry explicit `m`, `ω`, `ħ` so that natural units
//! (`m = ω = ħ = 1`) are just one parameter choice.

pub mod bath_dynamics;
pub mod bohm_velocity;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod phase_space;
pub mod quadratic_master;
pub mod special;

pub use error::{Error, Result};
