//! Bath-conditional propagation in the weak-coupling, short-time regime: the
//! slice factor `exp[−Σ (m_rω_r/ħ)(x_r − q_r(x, p))²]` times the system Wigner
//! function smoothed by `M̃`.

use super::matrices::{BathPropagators, PropagatorMode};
use super::sampling::CoherentBathSample;
use super::spectral::{BathSpec, SpectralDensity};
use crate::bohm_velocity::{initial_velocity, semiclassical_decomposition_unchecked, validity_window, MInverseParams};
use crate::error::{invalid, numerical, Error, Result};
use crate::linalg::Mat2;
use crate::phase_space::{ClassicalOrbit, EnergyBandState, OscillatorSystemSpec, WkbAmplitudes};
use crate::special::{one_minus_cos, sin_minus_u_cos, u_minus_sin};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `W̃_osc` enters the moments only above this fraction of the dominant branch weight.
pub const OSC_INCLUSION_RATIO: f64 = 1e-6;

/// `M̃(t) = 2ħ ∫ I(ω′) [[(ω′t − sin)²/(m²ω′⁴), −(ω′t − sin)(1 − cos)/(mω′³)], [·, (1 − cos)²/ω′²]] dω′`.
pub fn conditional_m_tilde(spectral: &SpectralDensity, mass: f64, hbar: f64, t: f64) -> Result<Mat2> {
    if t == 0.0 {
        return Ok(Mat2::ZERO);
    }
    let entry = |f: &dyn Fn(f64, f64) -> f64| 2.0 * hbar * spectral.integrate(|w| f(w, w * t), t);
    let m11 = entry(&|w, u| (u_minus_sin(u) / (mass * w * w)).powi(2));
    let m12 = entry(&|w, u| -u_minus_sin(u) * one_minus_cos(u) / (mass * w.powi(3)));
    let m22 = entry(&|w, u| (one_minus_cos(u) / w).powi(2));
    let m = Mat2::symmetric(m11, m12, m22);
    if !m.is_finite() {
        return Err(numerical(format!("M̃ quadrature failed at t = {t}")));
    }
    Ok(m)
}

/// `σ̃₃² = (2/(ħm²)) ∫ I(ω′) (sin ω′t − ω′t cos ω′t)²/ω′⁴ dω′`.
pub fn sigma3_squared(spectral: &SpectralDensity, mass: f64, hbar: f64, t: f64) -> Result<f64> {
    let s = 2.0 / (hbar * mass * mass) * spectral.integrate(|w| (sin_minus_u_cos(w * t) / (w * w)).powi(2), t);
    if !s.is_finite() {
        return Err(numerical(format!("σ̃₃ quadrature failed at t = {t}")));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalOptions {
    /// Keep the centre shift `δ` instead of setting it to zero.
    pub retain_delta: bool,
}

/// Everything needed to evaluate the conditional Wigner function at one time.
/// `q_r(x, p) = q_offset[r] + q_dx[r]·x + q_dp[r]·p`; the second component of
/// `D_r(t)(η̄_r − C_r(−t)η)` has the same affine form in `s_*`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalKernel {
    pub time: f64,
    pub system: OscillatorSystemSpec,
    pub q_offset: Vec<f64>,
    pub q_dx: Vec<f64>,
    pub q_dp: Vec<f64>,
    s_offset: Vec<f64>,
    s_dx: Vec<f64>,
    s_dp: Vec<f64>,
    b_minus: Vec<Mat2>,
    /// `m_rω_r/ħ`.
    pub slice_weights: Vec<f64>,
    pub m_tilde: Mat2,
    /// `None` when `M̃` is singular (no bath or `t = 0`).
    pub minv: Option<MInverseParams>,
    pub sigma3_sq: f64,
    pub options: ConditionalOptions,
}

/// Builds the kernel from weak-coupling blocks at time `t`, the bath's coherent
/// sample, and the density used for the `M̃`, `σ̃₃` quadratures.
pub fn conditional_kernel(
    props: &BathPropagators,
    bath: &BathSpec,
    sample: &CoherentBathSample,
    spectral: &SpectralDensity,
    options: ConditionalOptions,
) -> Result<ConditionalKernel> {
    if !matches!(props.mode, PropagatorMode::WeakCoupling { .. }) {
        return Err(invalid("conditional kernel needs weak-coupling propagators"));
    }
    let n = bath.len();
    if props.len() != n || sample.x_bar.len() != n || sample.p_bar.len() != n {
        return Err(invalid("propagators, bath and sample sizes differ"));
    }
    let sys = props.system;
    let t = props.time;
    // h odd, ḣ even, ḧ odd: C_r(−t) flips the off-diagonal entries
    let flip = |c: &Mat2| Mat2::new(c.get(0, 0), -c.get(0, 1), -c.get(1, 0), c.get(1, 1));
    let mut k = ConditionalKernel {
        time: t,
        system: sys,
        q_offset: Vec::with_capacity(n),
        q_dx: Vec::with_capacity(n),
        q_dp: Vec::with_capacity(n),
        s_offset: Vec::with_capacity(n),
        s_dx: Vec::with_capacity(n),
        s_dp: Vec::with_capacity(n),
        b_minus: props.b.iter().map(flip).collect(),
        slice_weights: bath.oscillators().iter().map(|o| o.mass * o.frequency / bath.hbar()).collect(),
        m_tilde: conditional_m_tilde(spectral, sys.mass, sys.hbar, t)?,
        minv: None,
        sigma3_sq: sigma3_squared(spectral, sys.mass, sys.hbar, t)?,
        options,
    };
    for r in 0..n {
        let d = props.d_free[r];
        let dc = d * flip(&props.c[r]);
        let [q0, s0] = d.apply([sample.x_bar[r], sample.p_bar[r]]);
        k.q_offset.push(q0);
        k.q_dx.push(-dc.get(0, 0));
        k.q_dp.push(-dc.get(0, 1));
        k.s_offset.push(s0);
        k.s_dx.push(-dc.get(1, 0));
        k.s_dp.push(-dc.get(1, 1));
    }
    let det = k.m_tilde.det();
    if det > 1e-14 * k.m_tilde.get(0, 0) * k.m_tilde.get(1, 1) && det > 0.0 {
        k.minv = Some(MInverseParams::from_m(k.m_tilde)?);
    }
    Ok(k)
}

impl ConditionalKernel {
    pub fn len(&self) -> usize {
        self.q_offset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_offset.is_empty()
    }

    pub fn q(&self, r: usize, x: f64, p: f64) -> f64 {
        self.q_offset[r] + self.q_dx[r] * x + self.q_dp[r] * p
    }

    /// `δ = Σ_r B_r(−t) (x_r, (D_r(t)(η̄_r − C_r(−t)η))₂)`.
    pub fn delta(&self, x: f64, p: f64, slice: &[f64]) -> [f64; 2] {
        let mut d = [0.0; 2];
        for (r, &xr) in slice.iter().enumerate() {
            let s = self.s_offset[r] + self.s_dx[r] * x + self.s_dp[r] * p;
            let v = self.b_minus[r].apply([xr, s]);
            d[0] += v[0];
            d[1] += v[1];
        }
        d
    }

    /// `Σ (m_rω_r/ħ) (∂q_r/∂p)²`; equals `σ̃₃²` for the short-time blocks.
    pub fn slice_momentum_curvature(&self) -> f64 {
        self.slice_weights.iter().zip(&self.q_dp).map(|(k, g)| k * g * g).sum()
    }
}

/// Branch weights and the resulting velocity at one `x` and bath slice.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConditionalVelocity {
    pub velocity: f64,
    /// Log-weights of `W̃₊`, `W̃₋`, `W̃_osc` after integrating over `p`.
    pub log_weights: [f64; 3],
    /// Means over `p` of the same three Gaussians.
    pub means: [f64; 3],
    pub osc_included: bool,
    /// `|δ|` at the two branch centres (reported even when zeroed).
    pub delta_norm: f64,
}

/// `ln ∫ exp(−αp² + 2βp + c) dp` and its mean `β/α`.
fn gaussian_moments(alpha: f64, beta: f64, c: f64) -> (f64, f64) {
    (0.5 * (PI / alpha).ln() + beta * beta / alpha + c, beta / alpha)
}

/// Conditional velocity from the three-term decomposition, without checking
/// the validity conditions. Each term times the slice factor is Gaussian in
/// `p`, so the moments are closed form.
pub fn conditional_velocity_unchecked(
    orbit: &ClassicalOrbit,
    wkb: &WkbAmplitudes,
    kernel: &ConditionalKernel,
    x: f64,
    slice: &[f64],
) -> Result<ConditionalVelocity> {
    if slice.len() != kernel.len() {
        return Err(invalid(format!("slice has {} coordinates, bath has {}", slice.len(), kernel.len())));
    }
    let minv = kernel.minv.ok_or_else(|| invalid("M̃ is singular; use conditional_velocity for t = 0 or N = 0"))?;
    let dec = semiclassical_decomposition_unchecked(&minv, orbit, wkb, x)?;
    let p_cl = dec.p_cl;
    let mass = kernel.system.mass;

    // slice factor −Σk(x_r − a_r − g_r p)² = −A p² + 2B p + C
    let (mut sa, mut sb, mut sc) = (0.0, 0.0, 0.0);
    for r in 0..kernel.len() {
        let (k, g) = (kernel.slice_weights[r], kernel.q_dp[r]);
        let e = slice[r] - kernel.q_offset[r] - kernel.q_dx[r] * x;
        sa += k * g * g;
        sb += k * g * e;
        sc -= k * e * e;
    }
    let dp = kernel.delta(x, p_cl, slice);
    let dm = kernel.delta(x, -p_cl, slice);
    let delta_norm = dp[0].hypot(dp[1]).max(dm[0].hypot(dm[1]));
    // δ shifts where the smoothed system function is read: centre ±p_cl(x + δ₁) − δ₂
    let centre = |sign: f64, d: [f64; 2]| {
        if kernel.options.retain_delta && orbit.is_inside(x + d[0]) {
            sign * orbit.p_cl(x + d[0]) - d[1]
        } else {
            sign * p_cl
        }
    };
    let branch = |sigma: f64, mu: f64, log_pref: f64| {
        let s2 = sigma * sigma;
        gaussian_moments(sa + s2, sb + s2 * mu, sc - s2 * mu * mu + log_pref)
    };
    let (lp, mp) = branch(dec.sigma_plus, centre(1.0, dp), (dec.sigma_plus / PI.sqrt() * dec.rho_plus).ln());
    let (lm, mm) = branch(dec.sigma_minus, centre(-1.0, dm), (dec.sigma_minus / PI.sqrt() * dec.rho_minus).ln());
    let osc_pref = (4.0 * dec.hbar * dec.sigma1 * dec.sigma2 * dec.delta.sqrt() / PI).sqrt()
        * (dec.rho_plus * dec.rho_minus).sqrt();
    let (lo, mo) = branch(dec.sigma2, -dec.beta * p_cl, osc_pref.ln() - (dec.sigma1 * p_cl).powi(2));

    let lead = lp.max(lm);
    if !lead.is_finite() {
        return Err(Error::UndefinedVelocity { x, density: 0.0, floor: 0.0 });
    }
    let osc_included = lo - lead > OSC_INCLUSION_RATIO.ln();
    let terms: &[(f64, f64)] = if osc_included { &[(lp, mp), (lm, mm), (lo, mo)] } else { &[(lp, mp), (lm, mm)] };
    let (mut num, mut den) = (0.0, 0.0);
    for &(l, mu) in terms {
        let w = (l - lead).exp();
        num += w * mu;
        den += w;
    }
    Ok(ConditionalVelocity {
        velocity: num / (mass * den),
        log_weights: [lp, lm, lo],
        means: [mp, mm, mo],
        osc_included,
        delta_norm,
    })
}

/// Conditional velocity with the checks the decomposition needs. A singular
/// `M̃` (no bath, or `t = 0`) leaves the slice factor independent of `p`, so the
/// velocity is that of the system state, taken with step `λ_B/100`.
pub fn conditional_velocity(
    state: &EnergyBandState,
    orbit: &ClassicalOrbit,
    wkb: &WkbAmplitudes,
    kernel: &ConditionalKernel,
    x: f64,
    slice: &[f64],
) -> Result<f64> {
    let sys = kernel.system;
    let Some(minv) = kernel.minv else {
        if kernel.time != 0.0 && !kernel.is_empty() {
            return Err(numerical(format!("M̃ singular at t = {} with {} modes", kernel.time, kernel.len())));
        }
        return initial_velocity(|y| state.amplitude(y, &sys), x, &sys, orbit.de_broglie / 100.0, 1e-300);
    };
    wkb.check_window(x, crate::phase_space::DEFAULT_TURNING_WINDOW)?;
    let report = validity_window(&minv, orbit, &sys, x);
    if !report.pass {
        return Err(Error::OutOfValidity(format!(
            "conditional decomposition invalid at x = {x}: margins {:.3e}, {:.3e}",
            report.first_margin, report.second_margin
        )));
    }
    Ok(conditional_velocity_unchecked(orbit, wkb, kernel, x, slice)?.velocity)
}

/// A bath slice drawn from `exp[−Σ (m_rω_r/ħ)(x_r − q_r(x, ±p_cl))²]`, the
/// branch picked with probabilities `ρ±/(ρ₊ + ρ₋)`. Returns the branch sign and the slice.
pub fn sample_slice<R: Rng>(
    kernel: &ConditionalKernel,
    orbit: &ClassicalOrbit,
    wkb: &WkbAmplitudes,
    x: f64,
    rng: &mut R,
) -> Result<(f64, Vec<f64>)> {
    let (rp, rm) = (wkb.rho_plus(x), wkb.rho_minus(x));
    if !(rp + rm > 0.0) {
        return Err(Error::UndefinedVelocity { x, density: rp + rm, floor: 0.0 });
    }
    let sign = if rng.random::<f64>() * (rp + rm) < rp { 1.0 } else { -1.0 };
    let p = sign * orbit.p_cl(x);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let slice = (0..kernel.len())
        .map(|r| kernel.q(r, x, p) + (0.5 / kernel.slice_weights[r]).sqrt() * unit.sample(rng))
        .collect();
    Ok((sign, slice))
}
