use super::orbit::ClassicalOrbit;
use super::state::EnergyBandState;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Fraction of `x_max` excluded next to each turning point.
pub const DEFAULT_TURNING_WINDOW: f64 = 0.05;

/// Slowly varying WKB amplitudes `g_±` of a band state, in the convention
/// `ψ ≈ i(e^{−iS/ħ}g_− − e^{iS/ħ}g_+)`.
///
/// Phases are fixed by matching the standard Hermite-function signs:
/// `g_− = (−1)^{n̄} g₀ Σ c_r i^r e^{−irθ}`, `g_+ = (−1)^{n̄} g₀ Σ c_r (−i)^r e^{irθ}`
/// with `θ = arcsin(x/x_max)` and `g₀ = (mω/(2πp_cl))^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbAmplitudes {
    pub orbit: ClassicalOrbit,
    /// `(r, c_r)` pairs.
    terms: Vec<(i64, Complex64)>,
    parity: f64,
}

pub fn wkb_amplitudes(state: &EnergyBandState, orbit: &ClassicalOrbit) -> WkbAmplitudes {
    WkbAmplitudes {
        orbit: *orbit,
        terms: state.levels().map(|(r, _, c)| (r, c)).collect(),
        parity: if state.mean_level() % 2 == 0 { 1.0 } else { -1.0 },
    }
}

/// `i^k` for any integer `k`.
fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl WkbAmplitudes {
    fn g0(&self, x: f64) -> f64 {
        let o = &self.orbit;
        (o.mass * o.frequency / (2.0 * PI * o.p_cl(x))).sqrt()
    }

    fn branch(&self, x: f64, sign: f64) -> Complex64 {
        if !self.orbit.is_inside(x) {
            return Complex64::new(0.0, 0.0);
        }
        let theta = self.orbit.theta(x);
        let s: Complex64 = self
            .terms
            .iter()
            .map(|&(r, c)| c * i_pow(-(sign as i64) * r) * Complex64::from_polar(1.0, sign * r as f64 * theta))
            .sum();
        s * (self.parity * self.g0(x))
    }

    pub fn g_plus(&self, x: f64) -> Complex64 {
        self.branch(x, 1.0)
    }

    pub fn g_minus(&self, x: f64) -> Complex64 {
        self.branch(x, -1.0)
    }

    pub fn rho_plus(&self, x: f64) -> f64 {
        self.g_plus(x).norm_sqr()
    }

    pub fn rho_minus(&self, x: f64) -> f64 {
        self.g_minus(x).norm_sqr()
    }

    pub fn phi_plus(&self, x: f64) -> f64 {
        self.g_plus(x).arg()
    }

    pub fn phi_minus(&self, x: f64) -> f64 {
        self.g_minus(x).arg()
    }

    /// Rejects `|x| ≥ x_max(1 − window)`.
    pub fn check_window(&self, x: f64, window: f64) -> Result<()> {
        let limit = self.orbit.x_max * (1.0 - window);
        if x.abs() >= limit {
            return Err(Error::OutOfValidity(format!(
                "x = {x} lies within the turning-point window (|x| must be < {limit})"
            )));
        }
        Ok(())
    }

    /// `i(e^{−iS/ħ}g_− − e^{iS/ħ}g_+)`.
    pub fn wavefunction(&self, x: f64, window: f64) -> Result<Complex64> {
        self.check_window(x, window)?;
        let phase = Complex64::from_polar(1.0, self.orbit.action(x) / self.orbit.hbar);
        Ok(Complex64::new(0.0, 1.0) * (phase.conj() * self.g_minus(x) - phase * self.g_plus(x)))
    }
}

/// WKB amplitude of a semiclassical band state with the default window.
pub fn wkb_wavefunction(state: &EnergyBandState, orbit: &ClassicalOrbit, x: f64) -> Result<Complex64> {
    if !state.semiclassical_ok() {
        return Err(Error::OutOfValidity(format!(
            "band n̄ = {}, Δn = {} is not semiclassical",
            state.mean_level(),
            state.band_width()
        )));
    }
    wkb_amplitudes(state, orbit).wavefunction(x, DEFAULT_TURNING_WINDOW)
}
