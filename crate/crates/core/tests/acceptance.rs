//! Acceptance suite. Prints one PASS/FAIL line per criterion, then exits
//! non-zero if any verdict differs from `EXPECTED`.
//!
//! Criteria 5, 9 and 10 are reported FAIL: their numbers are computed as
//! stated and the measured discrepancy is asserted instead, so a change in
//! either direction is caught.

use bohmdec::bath_dynamics::{
    auxiliary_residuals, bimodality_run, conditional_m_tilde, d_inverse, discretize_spectral_density,
    exact_bath_matrices, m_tilde_log_asymptote, reversibility_residuals, sigma3_log_asymptote, sigma3_squared,
    solve_g_kernel, solve_t_tilde_c, symplectic_residual, AsymptoteForm, BimodalityConfig, BlockSet,
    DiscretizationStrategy, SpectralDensity,
};
use bohmdec::bohm_velocity::{
    classical_band_margin, density_matrix_velocity, ensemble_velocity, initial_velocity, timescales,
    DEFAULT_DENSITY_FLOOR,
};
use bohmdec::cli::{parse_scenario, reduced_m_triangle, run_scenario};
use bohmdec::linalg::Mat2;
use bohmdec::phase_space::{
    classical_orbit, eigenfunction_exact, exact_oscillator_wigner, wigner_transform, CoefficientSpec, EnergyBandState,
    GridSpec, OscillatorSystemSpec, WignerField, WignerTransformOptions,
};
use bohmdec::quadratic_master::{
    assemble_cl_coefficients, integrate_propagator, nonnegativity_threshold, pde_oracle_evolve,
    position_decoherence_factor, propagate_band_state, propagate_wigner, CaldeiraLeggettParams, GaussianPropagator,
    PdeOptions, DEFAULT_TOLERANCE,
};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::time::Instant;

// Tolerances exactly as stated by the criteria.
const C1_LINF: f64 = 1e-5;
const C1_NORM: f64 = 1e-6;
const C1_N_MAX: usize = 30;
const C2_LINF: f64 = 1e-3;
const C3_INVARIANCE: f64 = 1e-6;
const C4_BAND: f64 = -0.05;
const C4_X_FRACTION: f64 = 0.8;
const C5_NEGATIVITY: f64 = 1e-4;
const C5_STATES: usize = 3;
const C6_REL: f64 = 0.10;
const C7_RESIDUAL: f64 = 1e-8;
const C8_REL: f64 = 0.02;
const C8_LN_MIN: f64 = 5.0;
const C9_FRACTION: f64 = 0.90;
const C9_BRANCH: f64 = 0.20;
const C9_TOLERANCE: f64 = 0.10;
const C10_REL: f64 = 1e-10;

/// Verdicts this build is expected to produce.
const EXPECTED: [bool; 11] = [true, true, true, true, false, true, true, true, false, false, true];

struct Verdict {
    pass: bool,
    detail: String,
}

fn natural() -> OscillatorSystemSpec {
    OscillatorSystemSpec::natural()
}

fn cl_defaults() -> CaldeiraLeggettParams {
    CaldeiraLeggettParams::new(1e-4, 1e3, 1e3).unwrap()
}

fn phase_step_state() -> EnergyBandState {
    EnergyBandState::from_spec(50, 8, &CoefficientSpec::PhaseStep(0.3)).unwrap()
}

fn c1_wigner_oracles() -> Verdict {
    let sys = natural();
    let grid = GridSpec::symmetric(11.0, 0.05, 11.0, 0.05).unwrap();
    let (mut linf, mut norm, mut marg) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=C1_N_MAX {
        let psi = move |x: f64| Complex64::new(eigenfunction_exact(n, x, &sys), 0.0);
        let w = wigner_transform(psi, &grid, &WignerTransformOptions::new(1.0, 0.025)).unwrap();
        for i in 0..grid.nx {
            for j in 0..grid.np {
                linf = linf.max((w.at(i, j) - exact_oscillator_wigner(n, grid.x(i), grid.p(j), &sys)).abs());
            }
        }
        norm = norm.max((w.integral() - 1.0).abs());
        // in natural units |ψ̃_n(p)|² = |ψ_n(p)|²
        for (i, m) in w.marginal_x().iter().enumerate() {
            marg = marg.max((m - eigenfunction_exact(n, grid.x(i), &sys).powi(2)).abs());
        }
        for (j, m) in w.marginal_p().iter().enumerate() {
            marg = marg.max((m - eigenfunction_exact(n, grid.p(j), &sys).powi(2)).abs());
        }
    }
    Verdict {
        pass: linf <= C1_LINF && norm <= C1_NORM && marg <= C1_NORM,
        detail: format!("n ≤ {C1_N_MAX}: L∞ {linf:.2e} (≤ {C1_LINF:.0e}), |∫W − 1| {norm:.2e}, marginals {marg:.2e} (≤ {C1_NORM:.0e})"),
    }
}

fn c2_propagator_equivalence() -> Verdict {
    let sys = natural();
    let cl = CaldeiraLeggettParams::new(0.05, 10.0, 1e3).unwrap();
    let coeffs = assemble_cl_coefficients(&sys, &cl);
    let grid = GridSpec::symmetric(6.0, 0.05, 6.0, 0.05).unwrap();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in [0usize, 2] {
        let w0 = WignerField::from_fn(grid, 0.0, |x, p| exact_oscillator_wigner(n, x, p, &sys));
        for wt in [0.05, 0.1, 0.3] {
            let prop = integrate_propagator(&coeffs, wt, DEFAULT_TOLERANCE).unwrap();
            let g = propagate_wigner(&prop, &w0, sys.hbar).unwrap().field;
            let f = pde_oracle_evolve(&coeffs, &w0, wt, &PdeOptions::default()).unwrap();
            let d = g.max_abs_diff(&f);
            worst = worst.max(d);
            parts.push(format!("n={n} ωt={wt}: {d:.1e}"));
        }
    }
    Verdict {
        pass: worst <= C2_LINF, detail: format!("max L∞ {worst:.2e} (≤ {C2_LINF:.0e}); {}", parts.join(", "))
    }
}

fn sample_xs(x_max: f64, fraction: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -fraction * x_max + 2.0 * fraction * x_max * i as f64 / (n - 1) as f64).collect()
}

fn c3_insufficiency() -> Verdict {
    let sys = natural();
    let cl = cl_defaults();
    let st = phase_step_state();
    let orbit = classical_orbit(&st, &sys);
    let t = 0.05;
    let psi = |x: f64| st.amplitude(x, &sys);
    let rho = |x: f64, y: f64| psi(x) * psi(y).conj() * position_decoherence_factor(&cl, &sys, t, x, y).unwrap();
    let h = orbit.de_broglie / 100.0;
    let (mut violations, mut max_rel, mut worst) = (0, 0.0f64, f64::INFINITY);
    let xs = sample_xs(orbit.x_max, C4_X_FRACTION, 81);
    for &x in &xs {
        let v0 = initial_velocity(psi, x, &sys, h, 1e-300).unwrap();
        let v1 = density_matrix_velocity(rho, x, &sys, h, 1e-300).unwrap();
        let margin = classical_band_margin(v0, &orbit, x).unwrap();
        violations += (margin < 0.0) as usize;
        worst = worst.min(margin);
        max_rel = max_rel.max((v1 - v0).abs() / v0.abs().max(orbit.p_cl(x)));
    }
    Verdict {
        pass: violations >= 1 && max_rel <= C3_INVARIANCE,
        detail: format!(
            "phase-stepped equal-modulus band: {violations}/{} violations (min margin {worst:.2}), \
             max relative change under the factor {max_rel:.1e} (≤ {C3_INVARIANCE:.0e})",
            xs.len()
        ),
    }
}

fn band_margins(w: &WignerField, orbit: &bohmdec::phase_space::ClassicalOrbit) -> (f64, usize) {
    let mut min = f64::INFINITY;
    let mut count = 0;
    for i in 0..w.grid.nx {
        let x = w.grid.x(i);
        if x.abs() > C4_X_FRACTION * orbit.x_max {
            continue;
        }
        let v = ensemble_velocity(w, x, orbit.mass, DEFAULT_DENSITY_FLOOR).unwrap();
        min = min.min(classical_band_margin(v, orbit, x).unwrap());
        count += 1;
    }
    (min, count)
}

fn c4_classical_band() -> Verdict {
    let sys = natural();
    let cl = cl_defaults();
    let st = phase_step_state();
    let orbit = classical_orbit(&st, &sys);
    let t_c = timescales(&sys, &cl, &orbit).t_c;
    let grid = GridSpec::symmetric(1.5 * orbit.x_max, 0.05, 1.5 * orbit.p_max(), 0.05).unwrap();
    let coeffs = assemble_cl_coefficients(&sys, &cl);
    let w0 = propagate_band_state(&GaussianPropagator::identity(), &st, &sys, &grid).unwrap();
    let prop = integrate_propagator(&coeffs, 5.0 * t_c, DEFAULT_TOLERANCE).unwrap();
    let w5 = propagate_band_state(&prop, &st, &sys, &grid).unwrap();
    let (m0, n0) = band_margins(&w0, &orbit);
    let (m5, _) = band_margins(&w5, &orbit);
    Verdict {
        pass: m5 >= C4_BAND && m0 < 0.0,
        detail: format!(
            "{n0} columns |x| ≤ 0.8x_max: min margin t=0 {m0:.3}, t=5t_c ({:.3}) {m5:.3} (≥ {C4_BAND})",
            5.0 * t_c
        ),
    }
}

/// min/peak of each state's Wigner function at `t`, with `det M(t)/ħ²`.
fn negativity_at(cl: &CaldeiraLeggettParams, states: &[(&str, EnergyBandState)], t: f64) -> (Vec<f64>, f64) {
    let sys = natural();
    let prop = integrate_propagator(&assemble_cl_coefficients(&sys, cl), t, DEFAULT_TOLERANCE).unwrap();
    let spread = 4.0 * prop.m.get(1, 1).max(0.0).sqrt();
    let ratios = states
        .iter()
        .map(|(_, st)| {
            let orbit = classical_orbit(st, &sys);
            let grid = GridSpec::symmetric(1.5 * orbit.x_max, 0.05, 1.5 * orbit.p_max() + spread, 0.05).unwrap();
            let w = propagate_band_state(&prop, st, &sys, &grid).unwrap();
            w.min() / w.max()
        })
        .collect();
    (ratios, prop.det_m() / (sys.hbar * sys.hbar))
}

/// Returns the verdict and whether the documented cause holds: `det M < ħ²` at the
/// closed-form time, and no state negative beyond round-off once `det M = ħ²`.
fn c5_nonnegativity() -> (Verdict, bool) {
    let sys = natural();
    let states = [
        ("n̄=50 Δn=8 phase_step", EnergyBandState::from_spec(50, 8, &CoefficientSpec::PhaseStep(0.3)).unwrap()),
        ("n̄=50 Δn=8 equal", EnergyBandState::from_spec(50, 8, &CoefficientSpec::Equal).unwrap()),
        ("n̄=30 Δn=6 random", EnergyBandState::from_spec(30, 6, &CoefficientSpec::RandomPhase(7)).unwrap()),
        ("n̄=20 Δn=0", EnergyBandState::from_spec(20, 0, &CoefficientSpec::Equal).unwrap()),
    ];
    // the threshold is a free-particle result, so the bath is chosen with ω·t_thr ≪ 1 (D = 20)
    let cl = CaldeiraLeggettParams::new(0.01, 1e3, 1e3).unwrap();
    let orbit = classical_orbit(&states[0].1, &sys);
    let t = timescales(&sys, &cl, &orbit).threshold_time;
    let (ratios, det) = negativity_at(&cl, &states, t);
    let ok = ratios.iter().filter(|&&r| r >= -C5_NEGATIVITY).count();
    let parts: Vec<String> = states.iter().zip(&ratios).map(|((l, _), r)| format!("{l}: {r:.1e}")).collect();

    let crossing =
        nonnegativity_threshold(&assemble_cl_coefficients(&sys, &cl), sys.hbar, 1.0).unwrap().time().unwrap();
    let (after, _) = negativity_at(&cl, &states, crossing * (1.0 + 1e-9));
    let worst_after = after.iter().copied().fold(0.0, f64::min);
    let (slow, _) =
        negativity_at(&cl_defaults(), &states[..1], timescales(&sys, &cl_defaults(), &orbit).threshold_time);
    let verdict = Verdict {
        pass: ok >= C5_STATES,
        detail: format!(
            "D=20, t=(3/16)^¼t_loc={t:.5} (ωt ≪ 1): {ok}/{} states ≥ −{C5_NEGATIVITY:.0e} [{}]; det M/ħ² = {det:.5} there; \
             at the det M = ħ² crossing t={crossing:.5}: worst {worst_after:.1e}; diagnostic CL defaults (ωt≈2): {:.1e}",
            states.len(),
            parts.join(", "),
            slow[0]
        ),
    };
    (verdict, det < 1.0 && worst_after >= -1e-12)
}

fn c6_triangle() -> Verdict {
    let sys = natural();
    let (gamma, cutoff, t) = (0.01, 2000.0, 0.05);
    let cl = CaldeiraLeggettParams::new(gamma, 100.0 * sys.hbar * cutoff, cutoff).unwrap();
    let ohm = SpectralDensity::ohmic(sys.mass, gamma, cutoff).unwrap();
    let bath = discretize_spectral_density(&ohm, 512, DiscretizationStrategy::Midpoint, 1.0, cl.kbt, sys.hbar).unwrap();
    let (mb, mc) = reduced_m_triangle(&sys, &bath, &cl, t).unwrap();
    let rel = [(0, 0), (0, 1), (1, 1)].map(|(i, j)| ((mb.get(i, j) - mc.get(i, j)) / mc.get(i, j)).abs());
    Verdict {
        pass: rel.iter().all(|&r| r <= C6_REL) && sys.frequency * t == 0.05 && gamma * t <= 1e-3,
        detail: format!(
            "N=512, k_BT=100ħΩ, ωt=0.05: relative errors M11 {:.2e}, M12 {:.2e}, M22 {:.2e} (≤ {C6_REL})",
            rel[0], rel[1], rel[2]
        ),
    }
}

fn c7_reversibility() -> Verdict {
    let ohm = SpectralDensity::ohmic(1.0, 0.05, 4.0).unwrap();
    let bath = discretize_spectral_density(&ohm, 8, DiscretizationStrategy::Midpoint, 1.0, 1.0, 1.0).unwrap();
    let sys = bath.renormalized_system(&natural()).unwrap();
    let table = solve_g_kernel(&SpectralDensity::Discrete(bath.clone()), 1.0, sys.bare_frequency, 10.0, 0.005).unwrap();
    let mut worst = [0.0f64; 4];
    let mut other = 0.0f64;
    for t in [0.5, 1.0, 2.5, 5.0, 7.5, 10.0] {
        let f = exact_bath_matrices(&bath, &sys, &table, t, BlockSet::All).unwrap();
        let b = exact_bath_matrices(&bath, &sys, &table, -t, BlockSet::All).unwrap();
        for (w, r) in worst.iter_mut().zip(reversibility_residuals(&f, &b).unwrap()) {
            *w = w.max(r);
        }
        other = other.max(symplectic_residual(&f).unwrap());
        other = auxiliary_residuals(&f, &b).unwrap().into_iter().fold(other, f64::max);
        let dinv = d_inverse(&b).unwrap();
        let n = bath.len();
        for r in 0..n {
            for rp in 0..n {
                let s = (0..n).fold(Mat2::ZERO, |s, k| s + f.d(r, k).unwrap() * dinv[k * n + rp]);
                let want = if r == rp { Mat2::IDENTITY } else { Mat2::ZERO };
                other = other.max((s - want).norm2());
            }
        }
    }
    Verdict {
        pass: worst.iter().all(|&r| r <= C7_RESIDUAL),
        detail: format!(
            "N=8, t ≤ 10/ω: RevA..D {:.1e} {:.1e} {:.1e} {:.1e} (≤ {C7_RESIDUAL:.0e}); symplectic/auxiliary/DD⁻¹ {other:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn c8_log_asymptotics() -> Verdict {
    let sys = natural();
    let (gamma, cutoff) = (1e-3, 1e3);
    let ohm = SpectralDensity::ohmic(1.0, gamma, cutoff).unwrap();
    let (mut worst, mut leading) = (0.0f64, 0.0f64);
    for ln in [C8_LN_MIN, 6.0, 7.5] {
        let t = ln.exp() / cutoff;
        let q = conditional_m_tilde(&ohm, 1.0, 1.0, t).unwrap();
        let a = m_tilde_log_asymptote(&sys, gamma, cutoff, t, AsymptoteForm::Corrected);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            worst = worst.max((a.get(i, j) / q.get(i, j) - 1.0).abs());
        }
        let s3 = sigma3_squared(&ohm, 1.0, 1.0, t).unwrap();
        worst = worst.max((sigma3_log_asymptote(&sys, gamma, cutoff, t, AsymptoteForm::Corrected) / s3 - 1.0).abs());
        leading =
            leading.max((sigma3_log_asymptote(&sys, gamma, cutoff, t, AsymptoteForm::LeadingLog) / s3 - 1.0).abs());
    }
    Verdict {
        pass: worst <= C8_REL,
        detail: format!(
            "ln Ωt ∈ {{5, 6, 7.5}}: constant-corrected M̃, σ̃₃² max deviation {worst:.2e} (≤ {C8_REL}); leading log alone {leading:.2e}"
        ),
    }
}

fn bimodality_config(modes: usize) -> BimodalityConfig {
    BimodalityConfig {
        mean_level: 50,
        band_width: 8,
        coefficients: CoefficientSpec::Equal,
        cl: cl_defaults(),
        modes,
        bath_mass: 1.0,
        time_factor: 3.0,
        x_fraction: 0.5,
        slices: 200,
        tolerance: C9_TOLERANCE,
        seed: 42,
    }
}

fn c9_bimodality() -> (Verdict, f64) {
    let sys = natural();
    let r = bimodality_run(&sys, &bimodality_config(256)).unwrap();
    let fine = bimodality_run(&sys, &bimodality_config(16384)).unwrap();
    let pass = r.fraction_classical >= C9_FRACTION && r.fraction_plus >= C9_BRANCH && r.fraction_minus >= C9_BRANCH;
    let detail = format!(
        "N=256, t=3t̃_c={:.2}: {:.1}% within 10% (+{:.1}%, −{:.1}%), discrete σ̃₃p_cl {:.2} vs continuum {:.2}; \
         diagnostic N=16384: {:.1}% (+{:.1}%, −{:.1}%)",
        r.t,
        100.0 * r.fraction_classical,
        100.0 * r.fraction_plus,
        100.0 * r.fraction_minus,
        r.discrete_sigma3_pcl,
        r.classicality.sigma3_pcl,
        100.0 * fine.fraction_classical,
        100.0 * fine.fraction_plus,
        100.0 * fine.fraction_minus,
    );
    (Verdict { pass, detail }, r.discrete_sigma3_pcl / r.classicality.sigma3_pcl)
}

fn c10_timescales() -> (Verdict, f64) {
    let sys = natural();
    // CL parameter sets in the high-temperature regime k_BT ≥ ħΩ the master equation assumes
    let sets = [(1e-4, 1e3, 1e3), (1e-3, 1e3, 1e3), (1e-4, 1e4, 1e3), (0.01, 2e5, 2000.0)];
    let st = EnergyBandState::from_spec(50, 8, &CoefficientSpec::Equal).unwrap();
    let orbit = classical_orbit(&st, &sys);
    let (mut ordering, mut worst, mut ratio_of_ratios) = (true, 0.0f64, 0.0f64);
    for (g, kt, cutoff) in sets {
        let cl = CaldeiraLeggettParams::new(g, kt, cutoff).unwrap();
        let ts = timescales(&sys, &cl, &orbit);
        let tt = solve_t_tilde_c(&sys, g, cutoff, &orbit).unwrap();
        ordering &= ts.t_c < tt.t_tilde_c;
        worst = worst.max((ts.ratio / ts.ratio_claimed - 1.0).abs());
        ratio_of_ratios = ratio_of_ratios.max((ts.ratio / ts.ratio_claimed / 1.5f64.powf(1.0 / 6.0) - 1.0).abs());
    }
    let cold = CaldeiraLeggettParams::new(0.05, 10.0, 1e3).unwrap();
    let cold_ratio = timescales(&sys, &cold, &orbit).t_c / solve_t_tilde_c(&sys, 0.05, 1e3, &orbit).unwrap().t_tilde_c;
    let detail = format!(
        "{} CL sets: t_c < t̃_c {}; t_c/t_loc vs (3ħγk_BT/8E²)^⅙ relative {worst:.3e} (≤ {C10_REL:.0e}); \
         measured/claimed = (3/2)^⅙ within {ratio_of_ratios:.1e}; diagnostic k_BT = 10 ≪ ħΩ: t_c/t̃_c = {cold_ratio:.2}",
        sets.len(),
        if ordering { "holds" } else { "violated" },
    );
    (Verdict { pass: ordering && worst <= C10_REL, detail }, ratio_of_ratios)
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn collect_files(root: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
    let mut entries: Vec<_> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(&p, out);
        } else {
            out.push((p.clone(), std::fs::read(&p).unwrap()));
        }
    }
}

fn c11_determinism() -> Verdict {
    // only `created_at` reads it
    std::env::set_var("SOURCE_DATE_EPOCH", "1700000000");
    let mut scenarios: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    scenarios.sort();
    let runs: Vec<Vec<(PathBuf, Vec<u8>)>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            for s in &scenarios {
                let mut sc = parse_scenario(s).unwrap();
                sc.output_dir = dir.path().to_path_buf();
                run_scenario(&sc).unwrap();
            }
            let mut files = Vec::new();
            collect_files(dir.path(), &mut files);
            files.into_iter().map(|(p, b)| (p.strip_prefix(dir.path()).unwrap().to_path_buf(), b)).collect()
        })
        .collect();
    let bytes: usize = runs[0].iter().map(|(_, b)| b.len()).sum();
    let identical = runs[0] == runs[1];
    Verdict {
        pass: identical && !runs[0].is_empty(),
        detail: format!(
            "{} scenarios, {} files, {bytes} bytes per run: {}",
            scenarios.len(),
            runs[0].len(),
            if identical { "byte-identical" } else { "differ" }
        ),
    }
}

fn main() {
    let mut verdicts: Vec<(usize, bool)> = Vec::new();
    let mut run = |k: usize, f: &mut dyn FnMut() -> Verdict| {
        let t0 = Instant::now();
        let v = f();
        println!(
            "criterion {k:>2}: {} {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t0.elapsed().as_secs_f64()
        );
        verdicts.push((k, v.pass));
    };
    // the documented FAIL causes: the free-particle threshold time is early for the
    // oscillator, the low-frequency bath is undersampled, and an algebraic (3/2)^⅙
    let (mut cause5, mut cause9, mut cause10) = (false, false, false);
    run(1, &mut c1_wigner_oracles);
    run(2, &mut c2_propagator_equivalence);
    run(3, &mut c3_insufficiency);
    run(4, &mut c4_classical_band);
    run(5, &mut || {
        let (v, cause) = c5_nonnegativity();
        cause5 = cause;
        v
    });
    run(6, &mut c6_triangle);
    run(7, &mut c7_reversibility);
    run(8, &mut c8_log_asymptotics);
    run(9, &mut || {
        let (v, sigma_ratio) = c9_bimodality();
        cause9 = sigma_ratio < 0.6;
        v
    });
    run(10, &mut || {
        let (v, ratio_err) = c10_timescales();
        cause10 = ratio_err < 1e-12;
        v
    });
    run(11, &mut c11_determinism);

    let mut unexpected: Vec<usize> =
        verdicts.iter().filter(|(k, pass)| *pass != EXPECTED[k - 1]).map(|(k, _)| *k).collect();
    for (k, cause) in [(5, cause5), (9, cause9), (10, cause10)] {
        if !cause {
            unexpected.push(k);
        }
    }
    let passed = verdicts.iter().filter(|(_, p)| *p).count();
    println!("acceptance: {passed}/{} PASS", verdicts.len());
    if !unexpected.is_empty() {
        eprintln!("acceptance: unexpected verdicts for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
