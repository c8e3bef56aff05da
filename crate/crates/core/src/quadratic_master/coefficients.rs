use crate::error::{invalid, Result};
use crate::linalg::Mat2;
use crate::phase_space::OscillatorSystemSpec;
use serde::{Deserialize, Serialize};

/// Scalar coefficient, constant or tabulated with linear interpolation
/// (held constant beyond the table ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Coefficient {
    Constant(f64),
    Table { times: Vec<f64>, values: Vec<f64> },
}

impl Coefficient {
    pub fn table(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid("coefficient table needs matching, non-empty time and value columns"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("coefficient table times must be strictly increasing"));
        }
        if values.iter().chain(&times).any(|v| !v.is_finite()) {
            return Err(invalid("coefficient table entries must be finite"));
        }
        Ok(Coefficient::Table { times, values })
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Table { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                let k = times.partition_point(|&s| s <= t);
                if k >= times.len() {
                    return *values.last().unwrap();
                }
                let (t0, t1) = (times[k - 1], times[k]);
                let f = (t - t0) / (t1 - t0);
                values[k - 1] * (1.0 - f) + values[k] * f
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

/// Coefficients of the general quadratic master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterEqCoefficients {
    pub h1: Coefficient,
    pub h2: Coefficient,
    pub h3: Coefficient,
    pub gamma: Coefficient,
    pub j11: Coefficient,
    pub j12: Coefficient,
    pub j22: Coefficient,
}

impl MasterEqCoefficients {
    pub fn constant(h1: f64, h2: f64, h3: f64, gamma: f64, j11: f64, j12: f64, j22: f64) -> Self {
        use Coefficient::Constant as C;
        Self { h1: C(h1), h2: C(h2), h3: C(h3), gamma: C(gamma), j11: C(j11), j12: C(j12), j22: C(j22) }
    }

    /// `K = [[−h₃, −h₂], [h₁, 2γ + h₃]]`.
    pub fn k(&self, t: f64) -> Mat2 {
        let h3 = self.h3.at(t);
        Mat2::new(-h3, -self.h2.at(t), self.h1.at(t), 2.0 * self.gamma.at(t) + h3)
    }

    pub fn j(&self, t: f64) -> Mat2 {
        let j12 = self.j12.at(t);
        Mat2::new(self.j11.at(t), j12, j12, self.j22.at(t))
    }

    pub fn is_time_independent(&self) -> bool {
        [&self.h1, &self.h2, &self.h3, &self.gamma, &self.j11, &self.j12, &self.j22].iter().all(|c| c.is_constant())
    }

    /// Whether `J` vanishes identically on the tabulated/constant data.
    pub fn is_diffusive(&self) -> bool {
        let nz = |c: &Coefficient| match c {
            Coefficient::Constant(v) => *v != 0.0,
            Coefficient::Table { values, .. } => values.iter().any(|v| *v != 0.0),
        };
        nz(&self.j11) || nz(&self.j12) || nz(&self.j22)
    }
}

/// Caldeira–Leggett bath parameters. Derived quantities are methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaldeiraLeggettParams {
    pub gamma: f64,
    pub kbt: f64,
    pub cutoff: f64,
}

impl CaldeiraLeggettParams {
    pub fn new(gamma: f64, kbt: f64, cutoff: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("kbt", kbt), ("cutoff", cutoff)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { gamma, kbt, cutoff })
    }

    /// `D = 2mγk_BT`.
    pub fn diffusion(&self, system: &OscillatorSystemSpec) -> f64 {
        2.0 * system.mass * self.gamma * self.kbt
    }

    /// `Λ = D/ħ²`.
    pub fn localization_rate(&self, system: &OscillatorSystemSpec) -> f64 {
        self.diffusion(system) / (system.hbar * system.hbar)
    }
}

/// Constant CL coefficients: `h₁ = mω²`, `h₂ = 1/m`, `h₃ = 0`, `J₂₂ = D`.
pub fn assemble_cl_coefficients(system: &OscillatorSystemSpec, cl: &CaldeiraLeggettParams) -> MasterEqCoefficients {
    let m = system.mass;
    let w = system.frequency;
    MasterEqCoefficients::constant(m * w * w, 1.0 / m, 0.0, cl.gamma, 0.0, 0.0, cl.diffusion(system))
}
