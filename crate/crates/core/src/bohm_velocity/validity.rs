use super::decomposition::MInverseParams;
use crate::phase_space::{ClassicalOrbit, OscillatorSystemSpec};
use serde::{Deserialize, Serialize};

/// `a ≪ b` is read as `10·a ≤ b`.
pub const MARGIN_FACTOR: f64 = 10.0;

/// Margins are `rhs/lhs`; the condition holds when a margin is at least [`MARGIN_FACTOR`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `mω b^{3/2} / (ħ Δ^{3/2})`, to be compared with `x_max`.
    pub first_lhs: f64,
    /// `8 mω ħ² b^{3/2}`, to be compared with `x_max`.
    pub second_lhs: f64,
    pub first_margin: f64,
    pub second_margin: f64,
    /// The same two conditions with the exact `|p″_cl(x)|` instead of its estimate.
    pub local_first_margin: f64,
    pub local_second_margin: f64,
    pub pass: bool,
}

fn margin(rhs: f64, lhs: f64) -> f64 {
    if lhs == 0.0 {
        f64::INFINITY
    } else {
        rhs / lhs
    }
}

pub fn validity_window(
    minv: &MInverseParams,
    orbit: &ClassicalOrbit,
    system: &OscillatorSystemSpec,
    x: f64,
) -> ValidityReport {
    let (m, w, hbar) = (system.mass, system.frequency, system.hbar);
    let b32 = minv.b.max(0.0).powf(1.5);
    let first_lhs = m * w * b32 / (hbar * minv.delta.powf(1.5));
    let second_lhs = 8.0 * m * w * hbar * hbar * b32;
    let first_margin = margin(orbit.x_max, first_lhs);
    let second_margin = margin(orbit.x_max, second_lhs);
    let (local_first_margin, local_second_margin) = if orbit.is_inside(x) {
        let pdd = orbit.d2p_cl(x).abs() / hbar;
        (
            margin(1.0, pdd * (minv.b / minv.delta).max(0.0).powf(1.5)),
            margin(1.0, pdd * (4.0 * hbar * hbar * minv.b).max(0.0).powf(1.5)),
        )
    } else {
        (0.0, 0.0)
    };
    ValidityReport {
        first_lhs,
        second_lhs,
        first_margin,
        second_margin,
        local_first_margin,
        local_second_margin,
        pass: first_margin >= MARGIN_FACTOR && second_margin >= MARGIN_FACTOR,
    }
}

/// `(ωt_loc)^{4/3} ≪ t/t_c ≪ (x_max/λ_B)^{4/9}` for the Caldeira-Leggett kernel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClValidity {
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub pass: bool,
}

pub fn cl_validity(t: f64, t_c: f64, t_loc: f64, orbit: &ClassicalOrbit) -> ClValidity {
    let s = t / t_c;
    let lower_margin = margin(s, (orbit.frequency * t_loc).powf(4.0 / 3.0));
    let upper_margin = margin((orbit.x_max / orbit.de_broglie).powf(4.0 / 9.0), s);
    ClValidity { lower_margin, upper_margin, pass: lower_margin >= MARGIN_FACTOR && upper_margin >= MARGIN_FACTOR }
}
