//! Caldeira-Leggett specialisation of the conditional classicality conditions:
//! log asymptotes of `M̃` and `σ̃₃`, the time `t̃_c`, and the bimodality run.

use super::conditional::{
    conditional_kernel, conditional_m_tilde, conditional_velocity_unchecked, sample_slice, sigma3_squared,
    ConditionalOptions,
};
use super::matrices::{coupling_strength, weak_coupling_matrices};
use super::sampling::{sample_bath, task_seed};
use super::spectral::{discretize_spectral_density, DiscretizationStrategy, SpectralDensity};
use crate::bohm_velocity::{
    sigma_parameters, timescales, validity_window, MInverseParams, ValidityReport, MARGIN_FACTOR,
};
use crate::error::{invalid, numerical, Result};
use crate::linalg::Mat2;
use crate::phase_space::{
    classical_orbit, wkb_amplitudes, ClassicalOrbit, CoefficientSpec, EnergyBandState, OscillatorSystemSpec,
};
use crate::quadratic_master::CaldeiraLeggettParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoteForm {
    /// `ln Ωt` terms only.
    LeadingLog,
    /// With the `O(1)` constants of the large-`Ωt` expansion.
    Corrected,
}

/// Constants `C_ij` in `∫₀^{Ωt}` of the three `M̃` integrands `= k_ij ln Ωt + C_ij + O(1/Ωt)`,
/// with `k = (1, 1, 3/2)`.
pub const M_TILDE_CONSTANTS: [f64; 3] =
    [-0.5 - LN_2 + EULER_GAMMA, -LN_2 + EULER_GAMMA, -0.5 * LN_2 + 1.5 * EULER_GAMMA];

/// Large-`Ωt` form of `M̃` for the Ohmic density with cutoff `Ω`.
pub fn m_tilde_log_asymptote(
    system: &OscillatorSystemSpec,
    gamma: f64,
    cutoff: f64,
    t: f64,
    form: AsymptoteForm,
) -> Mat2 {
    let (m, hbar) = (system.mass, system.hbar);
    let l = (cutoff * t).ln();
    let [c11, c12, c22] = match form {
        AsymptoteForm::LeadingLog => [0.0; 3],
        AsymptoteForm::Corrected => M_TILDE_CONSTANTS,
    };
    Mat2::symmetric(t * t / (m * m) * (l + c11), -t / m * (l + c12), 1.5 * l + c22).scale(4.0 * hbar * m * gamma / PI)
}

/// Leading-log `(ã, b̃, c̃)` and `Δ̃`.
pub fn minv_leading_log(system: &OscillatorSystemSpec, gamma: f64, cutoff: f64, t: f64) -> MInverseParams {
    let (m, hbar) = (system.mass, system.hbar);
    let l = (cutoff * t).ln();
    let k = PI / (2.0 * hbar * m * gamma * l);
    MInverseParams {
        a: k * 1.5 * m * m / (t * t),
        b: k,
        c: k * m / t,
        delta: PI * PI / (8.0 * hbar * hbar * (gamma * t * l).powi(2)),
    }
}

/// Large-`Ωt` form of `σ̃₃²`; the correction is `γ_E + ln 2 − 1` added to `ln Ωt`.
pub fn sigma3_log_asymptote(
    system: &OscillatorSystemSpec,
    gamma: f64,
    cutoff: f64,
    t: f64,
    form: AsymptoteForm,
) -> f64 {
    let mut l = (cutoff * t).ln();
    if form == AsymptoteForm::Corrected {
        l += EULER_GAMMA + LN_2 - 1.0;
    }
    2.0 * gamma * t * t * l / (PI * system.hbar * system.mass)
}

/// Root of `ωγt² ln Ωt = λ_B/x_max` and how it was bracketed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TTildeSolution {
    pub t_tilde_c: f64,
    /// `|f(t̃_c)|/(λ_B/x_max)`.
    pub relative_residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

const SCAN_POINTS: usize = 64;

/// Log-spaced scan over `[10/Ω, 1/(10γ)]` for a sign change, then bisection.
pub fn solve_t_tilde_c(
    system: &OscillatorSystemSpec,
    gamma: f64,
    cutoff: f64,
    orbit: &ClassicalOrbit,
) -> Result<TTildeSolution> {
    if !(gamma > 0.0 && cutoff > 0.0) {
        return Err(invalid(format!("t̃_c needs γ, Ω > 0 (γ = {gamma}, Ω = {cutoff})")));
    }
    let target = orbit.de_broglie / orbit.x_max;
    let f = |t: f64| system.frequency * gamma * t * t * (cutoff * t).ln() - target;
    let (lo, hi) = (10.0 / cutoff, 1.0 / (10.0 * gamma));
    if !(lo < hi) {
        return Err(numerical(format!("empty t̃_c bracket [{lo:e}, {hi:e}]")));
    }
    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|k| lo * (hi / lo).powf(k as f64 / SCAN_POINTS as f64)).collect();
    let Some(k) = grid.windows(2).position(|w| f(w[0]) <= 0.0 && f(w[1]) > 0.0) else {
        let (fl, fh) = (f(lo), f(hi));
        return Err(numerical(format!(
            "no t̃_c root in [{lo:e}, {hi:e}]: f ranges {fl:e} … {fh:e} around λ_B/x_max = {target:e}"
        )));
    };
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    let mut iterations = 0;
    while iterations < 200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let t = if f(a).abs() <= f(b).abs() { a } else { b };
    Ok(TTildeSolution {
        t_tilde_c: t,
        relative_residual: f(t).abs() / target,
        bracket: (grid[k], grid[k + 1]),
        iterations,
    })
}

/// The conditional classicality conditions at one `(t, x)` for the Ohmic density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalityReport {
    pub t: f64,
    pub x: f64,
    pub t_c: f64,
    pub t_tilde_c: TTildeSolution,
    pub ordering_ok: bool,
    pub sigma1_pcl: f64,
    pub sigma_plus_pcl: f64,
    pub sigma_minus_pcl: f64,
    pub sigma3_pcl: f64,
    /// Every `σ̃ p_cl ≥ MARGIN_FACTOR`.
    pub classical: bool,
    pub validity: ValidityReport,
    /// `ωγt² ln Ωt` divided by its lower bound and its upper bound divided by it.
    pub cl_validity_margins: (f64, f64),
    /// `ln Ωt ≤ ωx_max/(γλ_B)`, under which the `σ̃±` condition follows from the others.
    pub sigma_pm_auto: bool,
}

/// Evaluates the classicality conditions with `M̃` and `σ̃₃` from quadrature.
/// `x` defaults to `x_max/2`.
pub fn classicality_report(
    system: &OscillatorSystemSpec,
    orbit: &ClassicalOrbit,
    cl: &CaldeiraLeggettParams,
    t: f64,
    x: Option<f64>,
) -> Result<ClassicalityReport> {
    let x = x.unwrap_or(orbit.x_max / 2.0);
    let ohm = SpectralDensity::ohmic(system.mass, cl.gamma, cl.cutoff)?;
    let m_tilde = conditional_m_tilde(&ohm, system.mass, system.hbar, t)?;
    let minv = MInverseParams::from_m(m_tilde)?;
    let s = sigma_parameters(&minv, orbit, x)?;
    let p_cl = orbit.p_cl(x);
    let s3 = sigma3_squared(&ohm, system.mass, system.hbar, t)?.sqrt();
    let tt = solve_t_tilde_c(system, cl.gamma, cl.cutoff, orbit)?;
    let t_c = timescales(system, cl, orbit).t_c;
    let sig = [s.sigma1, s.sigma_plus, s.sigma_minus, s3].map(|v| v * p_cl);
    let ratio = orbit.de_broglie / orbit.x_max;
    let w = system.frequency;
    let mid = w * cl.gamma * t * t * (cl.cutoff * t).ln();
    Ok(ClassicalityReport {
        t,
        x,
        t_c,
        ordering_ok: t_c < tt.t_tilde_c,
        t_tilde_c: tt,
        sigma1_pcl: sig[0],
        sigma_plus_pcl: sig[1],
        sigma_minus_pcl: sig[2],
        sigma3_pcl: sig[3],
        classical: sig.iter().all(|&v| v >= MARGIN_FACTOR),
        validity: validity_window(&minv, orbit, system, x),
        cl_validity_margins: (mid / ((w * t).powi(2) * ratio.cbrt()), ratio.recip().cbrt() / mid),
        sigma_pm_auto: (cl.cutoff * t).ln() <= w * orbit.x_max / (cl.gamma * orbit.de_broglie),
    })
}

/// Parameters of the conditional-velocity bimodality run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimodalityConfig {
    pub mean_level: usize,
    pub band_width: usize,
    pub coefficients: CoefficientSpec,
    pub cl: CaldeiraLeggettParams,
    pub modes: usize,
    pub bath_mass: f64,
    /// `t = time_factor · t̃_c`.
    pub time_factor: f64,
    /// `x = x_fraction · x_max`.
    pub x_fraction: f64,
    pub slices: usize,
    pub tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SliceOutcome {
    /// Branch the slice was drawn around.
    pub branch: f64,
    pub velocity: f64,
    pub osc_included: bool,
    pub delta_norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimodalityReport {
    pub t: f64,
    pub x: f64,
    pub p_cl_over_m: f64,
    pub classicality: ClassicalityReport,
    /// Validity of the decomposition with the discrete bath's own `M̃`.
    pub discrete_validity: ValidityReport,
    pub discrete_sigma3_pcl: f64,
    pub coupling_warnings: Vec<String>,
    pub outcomes: Vec<SliceOutcome>,
    /// Share of slices with `|v| = p_cl/m` within the tolerance.
    pub fraction_classical: f64,
    pub fraction_plus: f64,
    pub fraction_minus: f64,
}

/// Draws the bath's coherent sample and `slices` bath slices, and evaluates the
/// conditional velocity for each with the short-time weak-coupling kernel.
pub fn bimodality_run(system: &OscillatorSystemSpec, cfg: &BimodalityConfig) -> Result<BimodalityReport> {
    if cfg.slices == 0 {
        return Err(invalid("bimodality run needs at least one slice"));
    }
    let state = EnergyBandState::from_spec(cfg.mean_level, cfg.band_width, &cfg.coefficients)?;
    let orbit = classical_orbit(&state, system);
    let wkb = wkb_amplitudes(&state, &orbit);
    let tt = solve_t_tilde_c(system, cfg.cl.gamma, cfg.cl.cutoff, &orbit)?;
    let t = cfg.time_factor * tt.t_tilde_c;
    let x = cfg.x_fraction * orbit.x_max;
    let classicality = classicality_report(system, &orbit, &cfg.cl, t, Some(x))?;

    let ohm = SpectralDensity::ohmic(system.mass, cfg.cl.gamma, cfg.cl.cutoff)?;
    let bath = discretize_spectral_density(
        &ohm,
        cfg.modes,
        DiscretizationStrategy::Midpoint,
        cfg.bath_mass,
        cfg.cl.kbt,
        system.hbar,
    )?;
    let props = weak_coupling_matrices(&bath, system, t, true);
    let sample = sample_bath(&bath, task_seed(cfg.seed, 0));
    let kernel = conditional_kernel(
        &props,
        &bath,
        &sample,
        &SpectralDensity::Discrete(bath.clone()),
        ConditionalOptions::default(),
    )?;
    let minv = kernel.minv.ok_or_else(|| numerical("discrete-bath M̃ is singular"))?;
    let discrete_validity = validity_window(&minv, &orbit, system, x);

    let outcomes: Vec<SliceOutcome> = (0..cfg.slices)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cfg.seed, 1 + i as u64));
            let (branch, slice) = sample_slice(&kernel, &orbit, &wkb, x, &mut rng)?;
            let v = conditional_velocity_unchecked(&orbit, &wkb, &kernel, x, &slice)?;
            Ok(SliceOutcome { branch, velocity: v.velocity, osc_included: v.osc_included, delta_norm: v.delta_norm })
        })
        .collect::<Result<_>>()?;
    let target = orbit.p_cl(x) / system.mass;
    let count = |sign: f64| {
        outcomes.iter().filter(|o| (o.velocity - sign * target).abs() <= cfg.tolerance * target).count() as f64
            / outcomes.len() as f64
    };
    let (fraction_plus, fraction_minus) = (count(1.0), count(-1.0));
    let mut coupling_warnings = props.warnings.clone();
    if coupling_warnings.is_empty() && coupling_strength(&bath, system) > 0.01 * system.frequency.powi(2) {
        coupling_warnings.push("coupling not weak".into());
    }
    Ok(BimodalityReport {
        t,
        x,
        p_cl_over_m: target,
        classicality,
        discrete_validity,
        discrete_sigma3_pcl: kernel.sigma3_sq.sqrt() * orbit.p_cl(x),
        coupling_warnings,
        outcomes,
        fraction_classical: fraction_plus + fraction_minus,
        fraction_plus,
        fraction_minus,
    })
}
