use crate::error::{invalid, Result};
use crate::linalg::Mat2;
use crate::phase_space::OscillatorSystemSpec;
use crate::special::gauss_legendre_composite;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathOscillator {
    pub mass: f64,
    pub frequency: f64,
    pub coupling: f64,
}

/// Finite bath of oscillators coupled through `κ_r x x_r`, in a thermal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    oscillators: Vec<BathOscillator>,
    kbt: f64,
    hbar: f64,
}

impl BathSpec {
    pub fn new(oscillators: Vec<BathOscillator>, kbt: f64, hbar: f64) -> Result<Self> {
        for (r, o) in oscillators.iter().enumerate() {
            if !(o.mass > 0.0 && o.frequency > 0.0 && o.coupling.is_finite()) {
                return Err(invalid(format!("bath oscillator {r} needs m_r, ω_r > 0 and finite κ_r: {o:?}")));
            }
        }
        if !(kbt >= 0.0 && kbt.is_finite() && hbar > 0.0) {
            return Err(invalid(format!("bath needs k_BT ≥ 0 and ħ > 0 (k_BT = {kbt}, ħ = {hbar})")));
        }
        Ok(Self { oscillators, kbt, hbar })
    }

    pub fn oscillators(&self) -> &[BathOscillator] {
        &self.oscillators
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    pub fn kbt(&self) -> f64 {
        self.kbt
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Same oscillators at a different temperature.
    pub fn with_temperature(&self, kbt: f64) -> Result<Self> {
        Self::new(self.oscillators.clone(), kbt, self.hbar)
    }

    /// Couplings multiplied by `s`.
    pub fn scaled_couplings(&self, s: f64) -> Self {
        let oscillators = self.oscillators.iter().map(|o| BathOscillator { coupling: o.coupling * s, ..*o }).collect();
        Self { oscillators, ..self.clone() }
    }

    /// `β_r = ħω_r/(k_BT)`; infinite at zero temperature.
    pub fn beta(&self, r: usize) -> f64 {
        self.hbar * self.oscillators[r].frequency / self.kbt
    }

    /// Coherent-state width `λ_r = (ħ/(m_rω_r))^{1/2}`.
    pub fn lambda(&self, r: usize) -> f64 {
        let o = &self.oscillators[r];
        (self.hbar / (o.mass * o.frequency)).sqrt()
    }

    /// `Λ_r = ħ⁻¹ diag(m_rω_r, 1/(m_rω_r))`.
    pub fn lambda_matrix(&self, r: usize) -> Mat2 {
        let mw = self.oscillators[r].mass * self.oscillators[r].frequency;
        Mat2::new(mw / self.hbar, 0.0, 0.0, 1.0 / (mw * self.hbar))
    }

    /// `Σ κ_r²/(m m_r ω_r²)`: the shift `ω₀² − ω²` the bath induces on the system.
    pub fn frequency_shift(&self, system_mass: f64) -> f64 {
        self.oscillators.iter().map(|o| o.coupling.powi(2) / (system_mass * o.mass * o.frequency.powi(2))).sum()
    }

    /// `system` with its bare frequency raised so that the renormalized one is unchanged.
    pub fn renormalized_system(&self, system: &OscillatorSystemSpec) -> Result<OscillatorSystemSpec> {
        system.with_bare_frequency((system.frequency.powi(2) + self.frequency_shift(system.mass)).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectralDensity {
    /// `Σ κ_r²/(2m_rω_r) δ(ω′ − ω_r)`.
    Discrete(BathSpec),
    /// `2mγω′/π` below the cutoff `Ω`, zero above.
    Ohmic { mass: f64, gamma: f64, cutoff: f64 },
}

/// Relative tolerance of the panel-doubling quadrature.
const QUAD_TOL: f64 = 1e-10;

impl SpectralDensity {
    pub fn ohmic(mass: f64, gamma: f64, cutoff: f64) -> Result<Self> {
        if !(mass > 0.0 && gamma >= 0.0 && cutoff > 0.0 && gamma.is_finite() && cutoff.is_finite()) {
            return Err(invalid(format!(
                "Ohmic density needs m, Ω > 0 and γ ≥ 0 (m = {mass}, γ = {gamma}, Ω = {cutoff})"
            )));
        }
        Ok(Self::Ohmic { mass, gamma, cutoff })
    }

    /// Continuous density; for a discrete bath this is zero away from the modes.
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Self::Discrete(_) => 0.0,
            Self::Ohmic { mass, gamma, cutoff } => {
                if (0.0..=*cutoff).contains(&w) {
                    2.0 * mass * gamma * w / PI
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest frequency carrying weight.
    pub fn max_frequency(&self) -> f64 {
        match self {
            Self::Discrete(b) => b.oscillators().iter().map(|o| o.frequency).fold(0.0, f64::max),
            Self::Ohmic { cutoff, .. } => *cutoff,
        }
    }

    /// `∫ I(ω′) f(ω′) dω′`. `oscillation` bounds how fast `f` oscillates in
    /// `ω′` (typically the time argument); panels are at most `π/(4·oscillation)` wide
    /// and doubled until successive estimates agree to 1e−10.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, oscillation: f64) -> f64 {
        match self {
            Self::Discrete(b) => {
                b.oscillators().iter().map(|o| o.coupling.powi(2) / (2.0 * o.mass * o.frequency) * f(o.frequency)).sum()
            }
            Self::Ohmic { cutoff, .. } => {
                let g = |w: f64| self.eval(w) * f(w);
                let width = (PI / (4.0 * oscillation.abs().max(1e-300))).min(cutoff / 16.0);
                let mut panels = (cutoff / width).ceil().max(16.0) as usize;
                let mut prev = gauss_legendre_composite(g, 0.0, *cutoff, panels);
                for _ in 0..12 {
                    panels *= 2;
                    let next = gauss_legendre_composite(g, 0.0, *cutoff, panels);
                    if (next - prev).abs() <= QUAD_TOL * next.abs().max(f64::MIN_POSITIVE) {
                        return next;
                    }
                    prev = next;
                }
                prev
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscretizationStrategy {
    /// `ω_r = (r − ½)Ω/N`.
    Midpoint,
    /// `ω_r = rΩ/N`.
    RightEndpoint,
}

/// Ohmic density sampled on a uniform grid over `(0, Ω]` with masses
/// `κ_r² = 2m_rω_r I(ω_r) Δω`. Every bath particle gets `bath_mass`.
pub fn discretize_spectral_density(
    ohmic: &SpectralDensity,
    n: usize,
    strategy: DiscretizationStrategy,
    bath_mass: f64,
    kbt: f64,
    hbar: f64,
) -> Result<BathSpec> {
    let SpectralDensity::Ohmic { cutoff, .. } = *ohmic else {
        return Err(invalid("discretization needs an Ohmic density"));
    };
    if n == 0 {
        return Err(invalid("discretization needs N ≥ 1"));
    }
    if !(bath_mass > 0.0) {
        return Err(invalid(format!("bath mass must be positive, got {bath_mass}")));
    }
    let dw = cutoff / n as f64;
    let oscillators = (1..=n)
        .map(|r| {
            let w = match strategy {
                DiscretizationStrategy::Midpoint => (r as f64 - 0.5) * dw,
                DiscretizationStrategy::RightEndpoint => r as f64 * dw,
            };
            BathOscillator {
                mass: bath_mass,
                frequency: w,
                coupling: (2.0 * bath_mass * w * ohmic.eval(w) * dw).sqrt(),
            }
        })
        .collect();
    BathSpec::new(oscillators, kbt, hbar)
}
