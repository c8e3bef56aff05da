//! The named experiments. Each returns its artifacts in memory; nothing is
//! written until every requested experiment has succeeded.

use super::output::{csv_artifact, json_artifact, Artifact, Cell};
use super::scenario::{Experiment, Model, Scenario, TimeScale};
use crate::bath_dynamics::{
    auxiliary_residuals, bimodality_run, d_inverse, discretize_spectral_density, exact_bath_matrices,
    reduced_m_from_bath, reversibility_residuals, solve_g_kernel, solve_t_tilde_c, symplectic_residual, task_seed,
    BathSpec, BimodalityConfig, BlockSet, DiscretizationStrategy, SpectralDensity, POINTS_PER_PERIOD,
};
use crate::bohm_velocity::{
    cl_validity, classical_band_margin, density_matrix_velocity, ensemble_velocity, initial_velocity, timescales,
    DEFAULT_DENSITY_FLOOR,
};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::phase_space::{
    classical_orbit, ClassicalOrbit, EnergyBandState, GridSpec, OscillatorSystemSpec, WignerField,
};
use crate::quadratic_master::{
    assemble_cl_coefficients, cl_short_time_m, integrate_propagator, nonnegativity_threshold,
    position_decoherence_factor, propagate_band_state, CaldeiraLeggettParams, GaussianPropagator, MasterEqCoefficients,
    Threshold, DEFAULT_TOLERANCE,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Relative change of `v̄_E` under the position decoherence factor that still counts as unchanged.
pub const INVARIANCE_TOLERANCE: f64 = 1e-6;
/// Reduced-M entries from the discrete bath must match the closed form to this relative tolerance.
pub const TRIANGLE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub artifacts: Vec<Artifact>,
    pub task_seeds: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentError {
    pub experiment: &'static str,
    pub source: Error,
}

impl std::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.experiment, self.source)
    }
}

impl std::error::Error for ExperimentError {}

/// Quantities shared by every experiment of one scenario.
struct Context<'a> {
    sc: &'a Scenario,
    system: OscillatorSystemSpec,
    state: EnergyBandState,
    orbit: ClassicalOrbit,
    coeffs: MasterEqCoefficients,
    cl: Option<CaldeiraLeggettParams>,
    times: Vec<f64>,
    grid: GridSpec,
}

impl<'a> Context<'a> {
    fn new(sc: &'a Scenario) -> Result<Self> {
        let system = sc.system;
        let state = EnergyBandState::from_spec(sc.mean_level, sc.band_width, &sc.coefficients)?;
        let orbit = classical_orbit(&state, &system);
        let cl = sc.model.cl().copied();
        let coeffs = match &sc.model {
            Model::CustomQuadratic(c) => c.clone(),
            Model::CaldeiraLeggett(cl) | Model::FiniteBath { cl, .. } => assemble_cl_coefficients(&system, cl),
        };
        let unit = match (sc.time_scale, &cl) {
            (TimeScale::Absolute, _) => 1.0,
            (_, None) => {
                return Err(Error::InvalidParameter("relative time scales need a Caldeira-Leggett model".into()))
            }
            (TimeScale::Tc, Some(cl)) => timescales(&system, cl, &orbit).t_c,
            (TimeScale::Tloc, Some(cl)) => timescales(&system, cl, &orbit).t_loc,
            (TimeScale::TtildeC, Some(cl)) => solve_t_tilde_c(&system, cl.gamma, cl.cutoff, &orbit)?.t_tilde_c,
        };
        let (xe, pe) = sc.grid_extent;
        let (nx, np) = sc.grid_points;
        let (xh, ph) = (xe * orbit.x_max, pe * orbit.p_max());
        let grid = GridSpec::new(-xh, xh, nx, -ph, ph, np)?;
        Ok(Self { sc, system, state, orbit, coeffs, cl, times: sc.times.iter().map(|t| t * unit).collect(), grid })
    }

    fn field(&self, t: f64) -> Result<WignerField> {
        let prop = if t == 0.0 {
            GaussianPropagator::identity()
        } else {
            integrate_propagator(&self.coeffs, t, DEFAULT_TOLERANCE)?
        };
        propagate_band_state(&prop, &self.state, &self.system, &self.grid)
    }

    fn sample_xs(&self) -> Vec<f64> {
        let half = self.sc.velocity_x_fraction * self.orbit.x_max;
        let n = self.sc.velocity_points;
        (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
    }

    fn cl(&self) -> Result<CaldeiraLeggettParams> {
        self.cl.ok_or_else(|| Error::InvalidParameter("experiment needs a Caldeira-Leggett model".into()))
    }

    /// `(x, v_E, p_cl/m, margin)` rows; undefined velocities are NaN.
    fn velocity_rows(&self, vs: &[(f64, Option<f64>)]) -> Result<(Vec<Vec<Cell>>, usize)> {
        let mut rows = Vec::with_capacity(vs.len());
        let mut violations = 0;
        for &(x, v) in vs {
            let vcl = self.orbit.p_cl(x) / self.system.mass;
            let margin = match v {
                Some(v) => classical_band_margin(v, &self.orbit, x)?,
                None => f64::NAN,
            };
            if margin < 0.0 {
                violations += 1;
            }
            rows.push(vec![Cell::F(x), Cell::F(v.unwrap_or(f64::NAN)), Cell::F(vcl), Cell::F(margin)]);
        }
        Ok((rows, violations))
    }

    fn ensemble_profile(&self, w: &WignerField) -> Result<Vec<(f64, Option<f64>)>> {
        self.sample_xs()
            .into_iter()
            .map(|x| match ensemble_velocity(w, x, self.system.mass, DEFAULT_DENSITY_FLOOR) {
                Ok(v) => Ok((x, Some(v))),
                Err(Error::UndefinedVelocity { .. }) => Ok((x, None)),
                Err(e) => Err(e),
            })
            .collect()
    }
}

const VELOCITY_COLUMNS: [&str; 4] = ["x", "v_E", "p_cl_over_m", "margin"];

/// Runs every requested experiment in order; the first failure aborts the run.
pub fn run_experiments(sc: &Scenario) -> std::result::Result<Vec<ExperimentOutput>, ExperimentError> {
    let ctx = Context::new(sc).map_err(|source| ExperimentError { experiment: "setup", source })?;
    sc.experiments
        .iter()
        .map(|&e| {
            let mut seeds = BTreeMap::new();
            run_one(&ctx, e, &mut seeds)
                .map(|artifacts| ExperimentOutput { experiment: e, artifacts, task_seeds: seeds })
                .map_err(|source| ExperimentError { experiment: e.name(), source })
        })
        .collect()
}

fn run_one(ctx: &Context, e: Experiment, seeds: &mut BTreeMap<String, u64>) -> Result<Vec<Artifact>> {
    match e {
        Experiment::WignerSnapshot => wigner_snapshot(ctx),
        Experiment::VelocityEnsemble => velocity_ensemble(ctx),
        Experiment::DecoherenceInsufficiency => decoherence_insufficiency(ctx),
        Experiment::ClassicalBandSweep => classical_band_sweep(ctx),
        Experiment::Timescales => timescale_report(ctx),
        Experiment::BathMatricesValidate => bath_matrices_validate(ctx),
        Experiment::ConditionalVelocityBimodality => bimodality(ctx, seeds),
    }
}

#[derive(Serialize)]
struct SnapshotIndex {
    times: Vec<f64>,
    files: Vec<String>,
    integral: Vec<f64>,
    min: Vec<f64>,
    max: Vec<f64>,
}

fn wigner_snapshot(ctx: &Context) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    let mut idx = SnapshotIndex { times: ctx.times.clone(), files: vec![], integral: vec![], min: vec![], max: vec![] };
    for (k, &t) in ctx.times.iter().enumerate() {
        let w = ctx.field(t)?;
        let g = &w.grid;
        let rows: Vec<Vec<Cell>> = (0..g.nx)
            .flat_map(|i| (0..g.np).map(move |j| (i, j)))
            .map(|(i, j)| vec![Cell::F(g.x(i)), Cell::F(g.p(j)), Cell::F(w.at(i, j))])
            .collect();
        let file = format!("wigner_t{k}.csv");
        out.push(csv_artifact(&file, &["x", "p", "W"], &rows));
        idx.files.push(file);
        idx.integral.push(w.integral());
        idx.min.push(w.min());
        idx.max.push(w.max());
    }
    out.push(json_artifact("snapshots.json", &idx));
    Ok(out)
}

#[derive(Serialize)]
struct VelocitySummary {
    times: Vec<f64>,
    files: Vec<String>,
    min_margin: Vec<f64>,
    violations: Vec<usize>,
    defined_points: Vec<usize>,
}

fn velocity_ensemble(ctx: &Context) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    let mut s = VelocitySummary {
        times: ctx.times.clone(),
        files: vec![],
        min_margin: vec![],
        violations: vec![],
        defined_points: vec![],
    };
    for (k, &t) in ctx.times.iter().enumerate() {
        let profile = ctx.ensemble_profile(&ctx.field(t)?)?;
        let (rows, violations) = ctx.velocity_rows(&profile)?;
        let file = format!("velocity_t{k}.csv");
        out.push(csv_artifact(&file, &VELOCITY_COLUMNS, &rows));
        s.files.push(file);
        s.min_margin.push(min_margin(&rows));
        s.violations.push(violations);
        s.defined_points.push(profile.iter().filter(|(_, v)| v.is_some()).count());
    }
    out.push(json_artifact("velocity_summary.json", &s));
    Ok(out)
}

fn min_margin(rows: &[Vec<Cell>]) -> f64 {
    rows.iter()
        .filter_map(|r| match r[3] {
            Cell::F(m) if m.is_finite() => Some(m),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Serialize)]
struct InvarianceReport {
    decoherence_time: f64,
    localization_rate: f64,
    /// Factor at `|x − x′| = λ_B`, showing the factor is not trivially 1.
    factor_at_de_broglie: f64,
    max_abs_change: f64,
    max_relative_change: f64,
    tolerance: f64,
    invariant: bool,
    band_violations: usize,
    points: usize,
    min_margin: f64,
}

fn decoherence_insufficiency(ctx: &Context) -> Result<Vec<Artifact>> {
    let cl = ctx.cl()?;
    let sys = ctx.system;
    let t = ctx.sc.decoherence_time;
    position_decoherence_factor(&cl, &sys, t, 0.0, 0.0)?;
    let psi = |x: f64| ctx.state.amplitude(x, &sys);
    let rho = |x: f64, xp: f64| {
        let f = position_decoherence_factor(&cl, &sys, t, x, xp).expect("validity depends on t only");
        psi(x) * psi(xp).conj() * f
    };
    let h = ctx.orbit.de_broglie / 100.0;
    let mut initial = Vec::new();
    let mut decohered = Vec::new();
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for x in ctx.sample_xs() {
        let v0 = undefined_as_none(initial_velocity(psi, x, &sys, h, 1e-300))?;
        let v1 = undefined_as_none(density_matrix_velocity(rho, x, &sys, h, 1e-300))?;
        if let (Some(a), Some(b)) = (v0, v1) {
            max_abs = max_abs.max((a - b).abs());
            max_rel = max_rel.max((a - b).abs() / a.abs().max(ctx.orbit.p_cl(x) / sys.mass));
        }
        initial.push((x, v0));
        decohered.push(vec![
            Cell::F(x),
            Cell::F(v0.unwrap_or(f64::NAN)),
            Cell::F(v1.unwrap_or(f64::NAN)),
            Cell::F(match (v0, v1) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => f64::NAN,
            }),
        ]);
    }
    let (rows, violations) = ctx.velocity_rows(&initial)?;
    let report = InvarianceReport {
        decoherence_time: t,
        localization_rate: cl.localization_rate(&sys),
        factor_at_de_broglie: position_decoherence_factor(&cl, &sys, t, 0.0, ctx.orbit.de_broglie)?,
        max_abs_change: max_abs,
        max_relative_change: max_rel,
        tolerance: INVARIANCE_TOLERANCE,
        invariant: max_rel <= INVARIANCE_TOLERANCE,
        band_violations: violations,
        points: rows.len(),
        min_margin: min_margin(&rows),
    };
    Ok(vec![
        csv_artifact("velocity_initial.csv", &VELOCITY_COLUMNS, &rows),
        csv_artifact("velocity_decohered.csv", &["x", "v_E", "v_E_decohered", "abs_change"], &decohered),
        json_artifact("invariance.json", &report),
    ])
}

fn undefined_as_none(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedVelocity { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn classical_band_sweep(ctx: &Context) -> Result<Vec<Artifact>> {
    let mut rows = Vec::new();
    for &t in &ctx.times {
        let profile = ctx.ensemble_profile(&ctx.field(t)?)?;
        let (vrows, violations) = ctx.velocity_rows(&profile)?;
        rows.push(vec![
            Cell::F(t),
            Cell::F(min_margin(&vrows)),
            Cell::I(violations as i64),
            Cell::I(profile.iter().filter(|(_, v)| v.is_some()).count() as i64),
        ]);
    }
    Ok(vec![csv_artifact("band_sweep.csv", &["t", "min_margin", "violations", "defined_points"], &rows)])
}

#[derive(Serialize)]
struct TimescaleJson {
    energy: f64,
    x_max: f64,
    de_broglie: f64,
    t_c: f64,
    t_loc: f64,
    t_tilde_c: f64,
    t_tilde_c_relative_residual: f64,
    threshold_time: f64,
    /// First `det M = ħ²` crossing of the integrated propagator, if reached within `4·t_loc`.
    threshold_numeric: Option<f64>,
    ratio: f64,
    ratio_claimed: f64,
    ratio_exact: f64,
    ordering_ok: bool,
    localization_rate: f64,
    diffusion: f64,
    cl_validity_lower_margin_at_t_c: f64,
    cl_validity_upper_margin_at_t_c: f64,
}

fn timescale_report(ctx: &Context) -> Result<Vec<Artifact>> {
    let cl = ctx.cl()?;
    let ts = timescales(&ctx.system, &cl, &ctx.orbit);
    let tt = solve_t_tilde_c(&ctx.system, cl.gamma, cl.cutoff, &ctx.orbit)?;
    let threshold = nonnegativity_threshold(&ctx.coeffs, ctx.system.hbar, 4.0 * ts.t_loc)?;
    let v = cl_validity(ts.t_c, ts.t_c, ts.t_loc, &ctx.orbit);
    let report = TimescaleJson {
        energy: ctx.orbit.energy,
        x_max: ctx.orbit.x_max,
        de_broglie: ctx.orbit.de_broglie,
        t_c: ts.t_c,
        t_loc: ts.t_loc,
        t_tilde_c: tt.t_tilde_c,
        t_tilde_c_relative_residual: tt.relative_residual,
        threshold_time: ts.threshold_time,
        threshold_numeric: match threshold {
            Threshold::At { time, .. } => Some(time),
            Threshold::NotReached { .. } => None,
        },
        ratio: ts.ratio,
        ratio_claimed: ts.ratio_claimed,
        ratio_exact: ts.ratio_exact,
        ordering_ok: ts.t_c < tt.t_tilde_c,
        localization_rate: ts.lambda,
        diffusion: ts.diffusion,
        cl_validity_lower_margin_at_t_c: v.lower_margin,
        cl_validity_upper_margin_at_t_c: v.upper_margin,
    };
    Ok(vec![json_artifact("timescales.json", &report)])
}

fn ohmic_bath(sc: &Scenario, cl: &CaldeiraLeggettParams, modes: usize) -> Result<BathSpec> {
    let (strategy, bath_mass) = match sc.model {
        Model::FiniteBath { strategy, bath_mass, .. } => (strategy, bath_mass),
        _ => (DiscretizationStrategy::Midpoint, 1.0),
    };
    let ohm = SpectralDensity::ohmic(sc.system.mass, cl.gamma, cl.cutoff)?;
    discretize_spectral_density(&ohm, modes, strategy, bath_mass, cl.kbt, sc.system.hbar)
}

#[derive(Serialize)]
struct TriangleJson {
    modes: usize,
    gamma: f64,
    cutoff: f64,
    kbt: f64,
    t: f64,
    omega_t: f64,
    gamma_t: f64,
    /// `[M11, M12, M22]`
    m_bath: [f64; 3],
    m_closed_form: [f64; 3],
    relative_error: [f64; 3],
    tolerance: f64,
    pass: bool,
}

/// Reduced `M` of an exact discrete Ohmic bath against the short-time CL closed form.
pub fn reduced_m_triangle(
    system: &OscillatorSystemSpec,
    bath: &BathSpec,
    cl: &CaldeiraLeggettParams,
    t: f64,
) -> Result<(Mat2, Mat2)> {
    let sys = bath.renormalized_system(system)?;
    let fastest = sys.bare_frequency.max(bath.oscillators().iter().map(|o| o.frequency).fold(0.0, f64::max));
    let limit = 2.0 * PI / (POINTS_PER_PERIOD * fastest);
    let step = t / (t / (0.5 * limit)).ceil();
    let table = solve_g_kernel(&SpectralDensity::Discrete(bath.clone()), sys.mass, sys.bare_frequency, t, step)?;
    let props = exact_bath_matrices(bath, &sys, &table, t, BlockSet::SystemOnly)?;
    let m_bath = reduced_m_from_bath(&props, bath, false)?;
    Ok((m_bath, cl_short_time_m(cl.diffusion(system), system.mass, t)))
}

fn bath_matrices_validate(ctx: &Context) -> Result<Vec<Artifact>> {
    let sc = ctx.sc;
    let bath = ohmic_bath(sc, &sc.bath_cl, sc.bath_modes)?;
    let sys = bath.renormalized_system(&ctx.system)?;
    let mut rows = Vec::new();
    for &t in &sc.bath_times {
        let table =
            solve_g_kernel(&SpectralDensity::Discrete(bath.clone()), sys.mass, sys.bare_frequency, t, sc.bath_step)?;
        let f = exact_bath_matrices(&bath, &sys, &table, t, BlockSet::All)?;
        let b = exact_bath_matrices(&bath, &sys, &table, -t, BlockSet::All)?;
        let rev = reversibility_residuals(&f, &b)?;
        let aux = auxiliary_residuals(&f, &b)?;
        let dinv = d_inverse(&b)?;
        let n = bath.len();
        let mut d_res = 0.0f64;
        for r in 0..n {
            for rp in 0..n {
                let mut s = Mat2::ZERO;
                for k in 0..n {
                    s = s + f.d(r, k)? * dinv[k * n + rp];
                }
                let want = if r == rp { Mat2::IDENTITY } else { Mat2::ZERO };
                d_res = d_res.max((s - want).norm2());
            }
        }
        let mut row = vec![Cell::F(t)];
        row.extend(rev.iter().chain(&aux).map(|&v| Cell::F(v)));
        row.push(Cell::F(symplectic_residual(&f)?));
        row.push(Cell::F(d_res));
        rows.push(row);
    }

    let cl = sc.triangle_cl;
    let tri_bath = ohmic_bath(sc, &cl, sc.triangle_modes)?;
    let t = sc.triangle_time;
    let (mb, mc) = reduced_m_triangle(&ctx.system, &tri_bath, &cl, t)?;
    let entries = |m: Mat2| [m.get(0, 0), m.get(0, 1), m.get(1, 1)];
    let (eb, ec) = (entries(mb), entries(mc));
    let rel = [0, 1, 2].map(|k| ((eb[k] - ec[k]) / ec[k]).abs());
    let tri = TriangleJson {
        modes: sc.triangle_modes,
        gamma: cl.gamma,
        cutoff: cl.cutoff,
        kbt: cl.kbt,
        t,
        omega_t: ctx.system.frequency * t,
        gamma_t: cl.gamma * t,
        m_bath: eb,
        m_closed_form: ec,
        relative_error: rel,
        tolerance: TRIANGLE_TOLERANCE,
        pass: rel.iter().all(|&r| r <= TRIANGLE_TOLERANCE),
    };
    Ok(vec![
        csv_artifact(
            "residuals.csv",
            &["t", "rev_a", "rev_b", "rev_c", "rev_d", "aux_1", "aux_2", "symplectic", "d_inverse"],
            &rows,
        ),
        json_artifact("triangle.json", &tri),
    ])
}

fn bimodality(ctx: &Context, seeds: &mut BTreeMap<String, u64>) -> Result<Vec<Artifact>> {
    let sc = ctx.sc;
    let (modes, bath_mass) = match sc.model {
        Model::FiniteBath { modes, bath_mass, .. } => (modes, bath_mass),
        _ => (sc.bimodality_modes, 1.0),
    };
    let cfg = BimodalityConfig {
        mean_level: sc.mean_level,
        band_width: sc.band_width,
        coefficients: sc.coefficients.clone(),
        cl: ctx.cl()?,
        modes,
        bath_mass,
        time_factor: sc.bimodality_time_factor,
        x_fraction: sc.bimodality_x_fraction,
        slices: sc.bimodality_slices,
        tolerance: sc.bimodality_tolerance,
        seed: sc.seed,
    };
    let mut report = bimodality_run(&ctx.system, &cfg)?;
    seeds.insert("bath_sample".into(), task_seed(sc.seed, 0));
    for i in 0..cfg.slices {
        seeds.insert(format!("slice_{i:05}"), task_seed(sc.seed, 1 + i as u64));
    }
    let rows: Vec<Vec<Cell>> = report
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            vec![
                Cell::I(i as i64),
                Cell::F(o.branch),
                Cell::F(o.velocity),
                Cell::F(o.velocity / report.p_cl_over_m),
                Cell::I(o.osc_included as i64),
                Cell::F(o.delta_norm),
            ]
        })
        .collect();
    report.outcomes.clear();
    Ok(vec![
        csv_artifact(
            "slices.csv",
            &["slice", "branch", "velocity", "velocity_over_p_cl_over_m", "osc_included", "delta_norm"],
            &rows,
        ),
        json_artifact("bimodality.json", &report),
    ])
}
