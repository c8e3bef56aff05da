use super::state::EnergyBandState;
use super::system::OscillatorSystemSpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Classical orbit at the band's mean energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOrbit {
    pub energy: f64,
    pub x_max: f64,
    pub de_broglie: f64,
    pub mass: f64,
    pub frequency: f64,
    pub hbar: f64,
}

pub fn classical_orbit(state: &EnergyBandState, system: &OscillatorSystemSpec) -> ClassicalOrbit {
    ClassicalOrbit::for_level(state.mean_level(), system)
}

impl ClassicalOrbit {
    pub fn for_level(n: usize, system: &OscillatorSystemSpec) -> Self {
        Self::for_energy(system.level_energy(n), system)
    }

    pub fn for_energy(energy: f64, system: &OscillatorSystemSpec) -> Self {
        let (m, w, hbar) = (system.mass, system.frequency, system.hbar);
        let x_max = (2.0 * energy / (m * w * w)).sqrt();
        Self { energy, x_max, de_broglie: hbar / (m * w * x_max), mass: m, frequency: w, hbar }
    }

    /// `p_cl(0) = mωx_max`.
    pub fn p_max(&self) -> f64 {
        self.mass * self.frequency * self.x_max
    }

    pub fn is_inside(&self, x: f64) -> bool {
        x.abs() < self.x_max
    }

    /// `mω(x_max² − x²)^{1/2}`, zero outside the orbit.
    pub fn p_cl(&self, x: f64) -> f64 {
        let d = self.x_max * self.x_max - x * x;
        if d <= 0.0 {
            0.0
        } else {
            self.mass * self.frequency * d.sqrt()
        }
    }

    pub fn dp_cl(&self, x: f64) -> f64 {
        let d = self.x_max * self.x_max - x * x;
        -self.mass * self.frequency * x / d.sqrt()
    }

    pub fn d2p_cl(&self, x: f64) -> f64 {
        let d = self.x_max * self.x_max - x * x;
        -self.mass * self.frequency * self.x_max * self.x_max / (d * d.sqrt())
    }

    /// `arcsin(x/x_max)`, clamped at the turning points.
    pub fn theta(&self, x: f64) -> f64 {
        (x / self.x_max).clamp(-1.0, 1.0).asin()
    }

    /// `S(x) = ∫_{−x_max}^x p_cl + h/8`, constant beyond the turning points.
    pub fn action(&self, x: f64) -> f64 {
        let a = self.x_max;
        let xc = x.clamp(-a, a);
        let d = (a * a - xc * xc).max(0.0);
        0.5 * self.mass * self.frequency * (xc * d.sqrt() + a * a * (self.theta(xc) + 0.5 * PI)) + 0.25 * PI * self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn level_fifty_in_natural_units() {
        let o = ClassicalOrbit::for_level(50, &OscillatorSystemSpec::natural());
        assert_eq!(o.energy, 50.5);
        assert!((o.x_max - 101f64.sqrt()).abs() < 1e-14);
        assert!((o.de_broglie - 1.0 / 101f64.sqrt()).abs() < 1e-15);
        assert!((o.de_broglie - 0.09950).abs() < 5e-6);
        assert_eq!(o.p_cl(o.x_max), 0.0);
        assert!((o.p_cl(0.0) - o.p_max()).abs() < 1e-14);
    }

    #[test]
    fn action_spans_half_orbit_plus_maslov_constant() {
        let sys = OscillatorSystemSpec::new(2.0, 1.0, 1.5, 0.7).unwrap();
        let o = ClassicalOrbit::for_level(20, &sys);
        assert!((o.action(-o.x_max) - 0.25 * PI * sys.hbar).abs() < 1e-12);
        // ∮p dx = 2πE/ω, so the half orbit carries πE/ω.
        let half = o.action(o.x_max) - o.action(-o.x_max);
        assert!((half - PI * o.energy / sys.frequency).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn action_derivative_is_classical_momentum(u in -0.95f64..0.95, n in 5usize..200) {
            let o = ClassicalOrbit::for_level(n, &OscillatorSystemSpec::natural());
            let x = u * o.x_max;
            let h = 1e-4 * o.x_max;
            let ds = (o.action(x + h) - o.action(x - h)) / (2.0 * h);
            prop_assert!((ds - o.p_cl(x)).abs() < 1e-6 * o.p_max());
            let dp = (o.p_cl(x + h) - o.p_cl(x - h)) / (2.0 * h);
            prop_assert!((dp - o.dp_cl(x)).abs() < 1e-5 * o.dp_cl(x).abs().max(1.0));
            let d2 = (o.dp_cl(x + h) - o.dp_cl(x - h)) / (2.0 * h);
            prop_assert!((d2 - o.d2p_cl(x)).abs() < 1e-5 * o.d2p_cl(x).abs());
        }

        #[test]
        fn action_is_monotone(u in -0.99f64..0.98) {
            let o = ClassicalOrbit::for_level(50, &OscillatorSystemSpec::natural());
            prop_assert!(o.action(u * o.x_max) < o.action((u + 0.01) * o.x_max));
        }
    }
}
