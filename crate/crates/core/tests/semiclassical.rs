use bohmdec::bohm_velocity::{
    ensemble_velocity, initial_velocity, semiclassical_decomposition, validity_window, MInverseParams,
    DEFAULT_DENSITY_FLOOR, MARGIN_FACTOR,
};
use bohmdec::phase_space::{
    classical_orbit, wigner_transform, wkb_amplitudes, CoefficientSpec, EnergyBandState, GridSpec,
    OscillatorSystemSpec, WignerTransformOptions,
};
use bohmdec::quadratic_master::{
    assemble_cl_coefficients, integrate_propagator, propagate_band_state, CaldeiraLeggettParams,
};

fn band_state() -> (OscillatorSystemSpec, EnergyBandState) {
    let sys = OscillatorSystemSpec::natural();
    let st = EnergyBandState::from_spec(50, 8, &CoefficientSpec::PhaseStep(0.3)).unwrap();
    (sys, st)
}

#[test]
fn ensemble_velocity_at_zero_time_equals_wavefunction_current() {
    let (sys, st) = band_state();
    let orbit = classical_orbit(&st, &sys);
    let grid = GridSpec::for_orbit(&orbit);
    let w = wigner_transform(|x| st.amplitude(x, &sys), &grid, &WignerTransformOptions::for_orbit(&orbit)).unwrap();
    let h = orbit.de_broglie / 100.0;
    let mut checked = 0;
    for i in (0..grid.nx).step_by(7) {
        let x = grid.x(i);
        if x.abs() > 0.95 * orbit.x_max || st.amplitude(x, &sys).norm_sqr() < 1e-4 {
            continue;
        }
        let ve = ensemble_velocity(&w, x, sys.mass, DEFAULT_DENSITY_FLOOR).unwrap();
        let vi = initial_velocity(|y| st.amplitude(y, &sys), x, &sys, h, 1e-12).unwrap();
        assert!((ve - vi).abs() < 1e-6, "x = {x}: {ve} vs {vi}");
        checked += 1;
    }
    assert!(checked > 20);
}

/// Where both the global and the local (exact `p″_cl`) validity conditions hold, the propagated field differs from
/// `W_cl` by no more than the oscillating term's envelope plus 5% of the peak.
#[test]
fn classical_part_reconstructs_propagated_field() {
    let (sys, st) = band_state();
    let orbit = classical_orbit(&st, &sys);
    let wkb = wkb_amplitudes(&st, &orbit);
    let cl = CaldeiraLeggettParams::new(1e-2, 1e3, 1e3).unwrap();
    let t = 0.26;
    let prop = integrate_propagator(&assemble_cl_coefficients(&sys, &cl), t, 1e-10).unwrap();
    let grid = GridSpec::for_orbit(&orbit);
    let w = propagate_band_state(&prop, &st, &sys, &grid).unwrap();
    let peak = w.max().abs().max(w.min().abs());
    let minv = MInverseParams::from_m(prop.m).unwrap();
    let ai = prop.a_inverse().unwrap();
    let det_a = prop.a.det();

    let mut worst = 0.0f64;
    let mut points = 0;
    for i in (0..grid.nx).step_by(3) {
        for j in (0..grid.np).step_by(3) {
            let (x0, p0) = {
                let v = ai.apply([grid.x(i), grid.p(j)]);
                (v[0], v[1])
            };
            if !orbit.is_inside(x0) {
                continue;
            }
            let v = validity_window(&minv, &orbit, &sys, x0);
            if !(v.pass && v.local_first_margin >= MARGIN_FACTOR && v.local_second_margin >= MARGIN_FACTOR) {
                continue;
            }
            let d = semiclassical_decomposition(&minv, &orbit, &wkb, x0).unwrap();
            let excess = (w.at(i, j) - d.w_cl(p0) / det_a).abs() - d.w_osc_envelope(p0) / det_a;
            worst = worst.max(excess / peak);
            points += 1;
        }
    }
    assert!(points > 1000, "only {points} points inside the validity window");
    assert!(worst <= 0.05, "excess over envelope = {worst:.4} of peak");
}
