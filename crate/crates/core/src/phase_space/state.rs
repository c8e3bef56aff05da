use super::system::OscillatorSystemSpec;
use crate::error::{invalid, Result};
use crate::special::hermite_combination;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Superposition `Σ_r c_r |n̄ + r⟩`, `r = −Δn/2 … Δn/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBandState {
    mean_level: usize,
    band_width: usize,
    coefficients: Vec<Complex64>,
    semiclassical_ok: bool,
}

/// How band coefficients are generated before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoefficientSpec {
    /// All `c_r` equal and real.
    Equal,
    /// Equal moduli with `c_r ∝ e^{−irφ}`: the equal-coefficient state after
    /// free evolution through phase `φ = ωt` (up to a global phase).
    PhaseStep(f64),
    /// Equal moduli with phases drawn uniformly from a seeded stream.
    RandomPhase(u64),
    Explicit(Vec<Complex64>),
}

impl CoefficientSpec {
    pub fn coefficients(&self, band_width: usize) -> Result<Vec<Complex64>> {
        let count = band_width + 1;
        let half = (band_width / 2) as f64;
        Ok(match self {
            CoefficientSpec::Equal => vec![Complex64::new(1.0, 0.0); count],
            CoefficientSpec::PhaseStep(phi) => {
                (0..count).map(|k| Complex64::from_polar(1.0, -(k as f64 - half) * phi)).collect()
            }
            CoefficientSpec::RandomPhase(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..count).map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())).collect()
            }
            CoefficientSpec::Explicit(c) => {
                if c.len() != count {
                    return Err(invalid(format!(
                        "expected {count} coefficients for band width {band_width}, got {}",
                        c.len()
                    )));
                }
                c.clone()
            }
        })
    }
}

/// Builds and normalizes a band state.
pub fn build_energy_band_state(
    mean_level: usize,
    band_width: usize,
    coefficients: Vec<Complex64>,
) -> Result<EnergyBandState> {
    if band_width % 2 != 0 {
        return Err(invalid(format!("band width must be even, got {band_width}")));
    }
    if band_width / 2 > mean_level {
        return Err(invalid(format!("EnergyBandState requires n̄ − Δn/2 ≥ 0 (n̄ = {mean_level}, Δn = {band_width})")));
    }
    if coefficients.len() != band_width + 1 {
        return Err(invalid(format!(
            "EnergyBandState requires Δn + 1 = {} coefficients, got {}",
            band_width + 1,
            coefficients.len()
        )));
    }
    let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(invalid("coefficient norm must be positive and finite"));
    }
    let coefficients = coefficients.into_iter().map(|c| c / norm).collect();
    let semiclassical_ok = mean_level >= 10 * band_width && mean_level >= 10;
    Ok(EnergyBandState { mean_level, band_width, coefficients, semiclassical_ok })
}

impl EnergyBandState {
    pub fn from_spec(mean_level: usize, band_width: usize, spec: &CoefficientSpec) -> Result<Self> {
        build_energy_band_state(mean_level, band_width, spec.coefficients(band_width)?)
    }

    /// Single eigenstate `|n⟩`.
    pub fn eigenstate(n: usize) -> Self {
        build_energy_band_state(n, 0, vec![Complex64::new(1.0, 0.0)]).expect("valid eigenstate")
    }

    pub fn mean_level(&self) -> usize {
        self.mean_level
    }

    pub fn band_width(&self) -> usize {
        self.band_width
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn semiclassical_ok(&self) -> bool {
        self.semiclassical_ok
    }

    pub fn lowest_level(&self) -> usize {
        self.mean_level - self.band_width / 2
    }

    pub fn highest_level(&self) -> usize {
        self.mean_level + self.band_width / 2
    }

    /// `(r, n̄ + r, c_r)` triples.
    pub fn levels(&self) -> impl Iterator<Item = (i64, usize, Complex64)> + '_ {
        let lo = self.lowest_level();
        let half = (self.band_width / 2) as i64;
        self.coefficients.iter().enumerate().map(move |(k, c)| (k as i64 - half, lo + k, *c))
    }

    /// Position amplitude `⟨x|ψ⟩`.
    pub fn amplitude(&self, x: f64, system: &OscillatorSystemSpec) -> Complex64 {
        let l = system.length_scale();
        hermite_combination(self.lowest_level(), &self.coefficients, x / l) / l.sqrt()
    }

    /// Mean energy `Σ|c_r|² E_{n̄+r}`.
    pub fn mean_energy(&self, system: &OscillatorSystemSpec) -> f64 {
        self.levels().map(|(_, n, c)| c.norm_sqr() * system.level_energy(n)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_eigenstate() {
        let s = build_energy_band_state(50, 0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(s.semiclassical_ok());
        assert_eq!(s.lowest_level(), 50);
    }

    #[test]
    fn equal_coefficients_normalize_to_inverse_sqrt_count() {
        let s = EnergyBandState::from_spec(50, 4, &CoefficientSpec::Equal).unwrap();
        for c in s.coefficients() {
            assert!((c.re - 1.0 / 5f64.sqrt()).abs() < 1e-15 && c.im == 0.0);
        }
        let total: f64 = s.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn low_level_band_is_not_semiclassical() {
        let s = EnergyBandState::from_spec(5, 4, &CoefficientSpec::RandomPhase(3)).unwrap();
        assert!(!s.semiclassical_ok());
        assert!(!EnergyBandState::from_spec(60, 8, &CoefficientSpec::Equal).unwrap().semiclassical_ok());
        assert!(EnergyBandState::from_spec(80, 8, &CoefficientSpec::Equal).unwrap().semiclassical_ok());
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert!(build_energy_band_state(1, 4, vec![Complex64::new(1.0, 0.0); 5]).is_err());
        assert!(build_energy_band_state(10, 4, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(build_energy_band_state(10, 3, vec![Complex64::new(1.0, 0.0); 4]).is_err());
        assert!(build_energy_band_state(10, 0, vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn phase_step_matches_free_evolution_of_equal_state() {
        let phi = 0.3;
        let s = EnergyBandState::from_spec(20, 4, &CoefficientSpec::PhaseStep(phi)).unwrap();
        let e = EnergyBandState::from_spec(20, 4, &CoefficientSpec::Equal).unwrap();
        // e^{-i(n+½)φ} applied level by level, then remove the global phase of the middle level.
        let global = Complex64::from_polar(1.0, (20.0 + 0.5) * phi);
        for ((_, n, c), (_, _, d)) in s.levels().zip(e.levels()) {
            let evolved = d * Complex64::from_polar(1.0, -(n as f64 + 0.5) * phi) * global;
            assert!((evolved - c).norm() < 1e-14);
        }
    }
}
