use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the system particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSystemSpec {
    pub mass: f64,
    /// Frequency appearing in the bare Hamiltonian coupled to the bath.
    pub bare_frequency: f64,
    /// Frequency of the effective (renormalized) oscillator.
    pub frequency: f64,
    pub hbar: f64,
}

impl OscillatorSystemSpec {
    pub fn new(mass: f64, bare_frequency: f64, frequency: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("bare_frequency", bare_frequency), ("frequency", frequency), ("hbar", hbar)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { mass, bare_frequency, frequency, hbar })
    }

    /// `m = ω₀ = ω = ħ = 1`.
    pub fn natural() -> Self {
        Self { mass: 1.0, bare_frequency: 1.0, frequency: 1.0, hbar: 1.0 }
    }

    /// Same system with a different bare frequency.
    pub fn with_bare_frequency(mut self, bare_frequency: f64) -> Result<Self> {
        self.bare_frequency = bare_frequency;
        Self::new(self.mass, self.bare_frequency, self.frequency, self.hbar)
    }

    /// Oscillator length `(ħ/mω)^{1/2}`.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mass * self.frequency)).sqrt()
    }

    /// Oscillator momentum `(ħmω)^{1/2}`.
    pub fn momentum_scale(&self) -> f64 {
        (self.hbar * self.mass * self.frequency).sqrt()
    }

    /// `E_n = (n + ½)ħω`.
    pub fn level_energy(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.hbar * self.frequency
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_fields() {
        assert!(OscillatorSystemSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(OscillatorSystemSpec::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(OscillatorSystemSpec::new(1.0, 1.0, 1.0, f64::NAN).is_err());
        assert_eq!(OscillatorSystemSpec::new(1.0, 1.0, 1.0, 1.0).unwrap(), OscillatorSystemSpec::natural());
    }
}
