use crate::phase_space::{ClassicalOrbit, OscillatorSystemSpec};
use crate::quadratic_master::CaldeiraLeggettParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimescaleReport {
    /// `(3m²λ_B²/D)^{1/3}`
    pub t_c: f64,
    /// `(ħ/(γk_BT))^{1/2}`
    pub t_loc: f64,
    /// `(3/16)^{1/4} t_loc`, where the free-particle kernel becomes non-negative.
    pub threshold_time: f64,
    pub ratio: f64,
    /// `(3ħγk_BT/(8E²))^{1/6}`, the closed form quoted for `t_c/t_loc`.
    pub ratio_claimed: f64,
    /// `(9ħγk_BT/(16E²))^{1/6}`, which `t_c/t_loc` equals identically.
    pub ratio_exact: f64,
    pub lambda: f64,
    pub diffusion: f64,
}

pub fn timescales(
    system: &OscillatorSystemSpec,
    cl: &CaldeiraLeggettParams,
    orbit: &ClassicalOrbit,
) -> TimescaleReport {
    let m = system.mass;
    let d = cl.diffusion(system);
    let t_c = (3.0 * m * m * orbit.de_broglie.powi(2) / d).cbrt();
    let gk = cl.gamma * cl.kbt;
    let t_loc = (system.hbar / gk).sqrt();
    let e2 = orbit.energy * orbit.energy;
    TimescaleReport {
        t_c,
        t_loc,
        threshold_time: (3.0f64 / 16.0).powf(0.25) * t_loc,
        ratio: t_c / t_loc,
        ratio_claimed: (3.0 * system.hbar * gk / (8.0 * e2)).powf(1.0 / 6.0),
        ratio_exact: (9.0 * system.hbar * gk / (16.0 * e2)).powf(1.0 / 6.0),
        lambda: cl.localization_rate(system),
        diffusion: d,
    }
}

/// Short-time CL form of `σ₁² p_cl²`.
pub fn cl_sigma1_pcl_squared(d: f64, system: &OscillatorSystemSpec, t: f64, p_cl: f64, dp_cl: f64) -> f64 {
    let (m, h) = (system.mass, system.hbar);
    let lead = d * t.powi(3) * p_cl * p_cl / (3.0 * m * m * h * h);
    lead / (1.0 + 4.0 * d * d * t.powi(6) * dp_cl * dp_cl / (9.0 * m.powi(4) * h * h))
}
