use super::validity::validity_window;
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat2;
use crate::phase_space::{ClassicalOrbit, OscillatorSystemSpec, WkbAmplitudes};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Entries of `M⁻¹ = [[a, c], [c, b]]` and `Δ = det M⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MInverseParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

impl MInverseParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let delta = a * b - c * c;
        if !(b > 0.0 && delta > 0.0 && a.is_finite() && c.is_finite()) {
            return Err(invalid(format!("M⁻¹ not positive definite: a = {a}, b = {b}, c = {c}")));
        }
        Ok(Self { a, b, c, delta })
    }

    /// Requires `M` positive definite.
    pub fn from_m(m: Mat2) -> Result<Self> {
        let det = m.det();
        if !(det > 0.0 && m.get(0, 0) > 0.0) {
            return Err(invalid(format!("M is not positive definite (det = {det:e})")));
        }
        let [[m11, m12], [_, m22]] = m.0;
        Ok(Self { a: m22 / det, b: m11 / det, c: -m12 / det, delta: 1.0 / det })
    }
}

/// Closed-form σ-parameters at one `x` plus the WKB densities there.
#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalDecomposition {
    pub x: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub beta: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub p_cl: f64,
    pub delta: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl SemiclassicalDecomposition {
    /// Two Gaussians of widths `1/σ±` centred on `±p_cl`; non-negative.
    pub fn w_cl(&self, p: f64) -> f64 {
        let sp = self.sigma_plus;
        let sm = self.sigma_minus;
        sp / PI.sqrt() * (-(sp * (p - self.p_cl)).powi(2)).exp() * self.rho_plus
            + sm / PI.sqrt() * (-(sm * (p + self.p_cl)).powi(2)).exp() * self.rho_minus
    }

    /// Exponent of the oscillating term's Gaussian envelope.
    pub fn osc_exponent(&self, p: f64) -> f64 {
        -(self.sigma2 * (p + self.beta * self.p_cl)).powi(2) - (self.sigma1 * self.p_cl).powi(2)
    }

    /// `|W_osc|` bound: the oscillating term with its cosine replaced by 1.
    pub fn w_osc_envelope(&self, p: f64) -> f64 {
        let pref = 4.0 * self.hbar * self.sigma1 * self.sigma2 * self.delta.sqrt() / PI;
        pref.sqrt() * self.osc_exponent(p).exp() * (self.rho_plus * self.rho_minus).sqrt()
    }

    /// `∫p W_cl dp / (m ∫W_cl dp)` in closed form.
    pub fn w_cl_velocity(&self) -> f64 {
        let s = self.rho_plus + self.rho_minus;
        self.p_cl / self.mass * (self.rho_plus - self.rho_minus) / s
    }
}

/// `σ±`, `σ₁`, `σ₂` and `β` at one `x`; these depend only on `M⁻¹` and the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaParams {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub beta: f64,
}

pub fn sigma_parameters(minv: &MInverseParams, orbit: &ClassicalOrbit, x: f64) -> Result<SigmaParams> {
    if !orbit.is_inside(x) {
        return Err(Error::OutOfValidity(format!("|x| = {} outside the classical orbit", x.abs())));
    }
    let MInverseParams { a, b, c, delta } = *minv;
    let h2 = orbit.hbar * orbit.hbar;
    let dp = orbit.dp_cl(x);
    let sp2 = delta / (a + 2.0 * c * dp + b * dp * dp);
    let sm2 = delta / (a - 2.0 * c * dp + b * dp * dp);
    let q = h2 * a * delta + b * dp * dp;
    let s1_2 = delta / q;
    let s2_2 =
        q / (h2 * a * a + (1.0 - 2.0 * h2 * c * c + h2 * h2 * delta * delta) * dp * dp + h2 * b * b * dp.powi(4));
    let beta = c * (1.0 + h2 * delta) * dp / q;
    for (name, v) in [("σ+²", sp2), ("σ−²", sm2), ("σ₁²", s1_2), ("σ₂²", s2_2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Numerical(format!("{name} = {v:e} at x = {x}")));
        }
    }
    Ok(SigmaParams { sigma_plus: sp2.sqrt(), sigma_minus: sm2.sqrt(), sigma1: s1_2.sqrt(), sigma2: s2_2.sqrt(), beta })
}

/// Evaluates the σ-parameters without checking the validity window.
pub fn semiclassical_decomposition_unchecked(
    minv: &MInverseParams,
    orbit: &ClassicalOrbit,
    wkb: &WkbAmplitudes,
    x: f64,
) -> Result<SemiclassicalDecomposition> {
    let s = sigma_parameters(minv, orbit, x)?;
    Ok(SemiclassicalDecomposition {
        x,
        sigma_plus: s.sigma_plus,
        sigma_minus: s.sigma_minus,
        sigma1: s.sigma1,
        sigma2: s.sigma2,
        beta: s.beta,
        rho_plus: wkb.rho_plus(x),
        rho_minus: wkb.rho_minus(x),
        p_cl: orbit.p_cl(x),
        delta: minv.delta,
        hbar: orbit.hbar,
        mass: orbit.mass,
    })
}

/// As [`semiclassical_decomposition_unchecked`], but fails outside the validity window.
pub fn semiclassical_decomposition(
    minv: &MInverseParams,
    orbit: &ClassicalOrbit,
    wkb: &WkbAmplitudes,
    x: f64,
) -> Result<SemiclassicalDecomposition> {
    let system = OscillatorSystemSpec {
        mass: orbit.mass,
        bare_frequency: orbit.frequency,
        frequency: orbit.frequency,
        hbar: orbit.hbar,
    };
    let report = validity_window(minv, orbit, &system, x);
    if !report.pass {
        return Err(Error::OutOfValidity(format!(
            "semiclassical decomposition invalid at x = {x}: margins {:.3e}, {:.3e}",
            report.first_margin, report.second_margin
        )));
    }
    semiclassical_decomposition_unchecked(minv, orbit, wkb, x)
}
