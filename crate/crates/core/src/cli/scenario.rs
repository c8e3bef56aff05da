//! Flat `key = value` scenario files. Every key has a documented default;
//! unknown keys are hard errors.

use crate::bath_dynamics::DiscretizationStrategy;
use crate::phase_space::{CoefficientSpec, EnergyBandState, OscillatorSystemSpec};
use crate::quadratic_master::{CaldeiraLeggettParams, Coefficient, MasterEqCoefficients};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    WignerSnapshot,
    VelocityEnsemble,
    DecoherenceInsufficiency,
    ClassicalBandSweep,
    Timescales,
    BathMatricesValidate,
    ConditionalVelocityBimodality,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::WignerSnapshot,
        Experiment::VelocityEnsemble,
        Experiment::DecoherenceInsufficiency,
        Experiment::ClassicalBandSweep,
        Experiment::Timescales,
        Experiment::BathMatricesValidate,
        Experiment::ConditionalVelocityBimodality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::WignerSnapshot => "wigner-snapshot",
            Experiment::VelocityEnsemble => "velocity-ensemble",
            Experiment::DecoherenceInsufficiency => "decoherence-insufficiency",
            Experiment::ClassicalBandSweep => "classical-band-sweep",
            Experiment::Timescales => "timescales",
            Experiment::BathMatricesValidate => "bath-matrices-validate",
            Experiment::ConditionalVelocityBimodality => "conditional-velocity-bimodality",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::WignerSnapshot => "propagated Wigner function of the band state on the x-p grid at each time",
            Experiment::VelocityEnsemble => "ensemble-averaged velocity and classical band margin at each time",
            Experiment::DecoherenceInsufficiency => {
                "initial ensemble velocity against p_cl/m, and its invariance under the position decoherence factor"
            }
            Experiment::ClassicalBandSweep => "minimum classical band margin over |x| <= x_fraction*x_max versus time",
            Experiment::Timescales => "t_c, t_loc, the non-negativity threshold and the conditional time t~_c",
            Experiment::BathMatricesValidate => {
                "exact finite-bath blocks: reversibility, symplecticity, inverse identities and the reduced M"
            }
            Experiment::ConditionalVelocityBimodality => "conditional velocities over sampled bath slices",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Experiments that need a Caldeira-Leggett temperature and cutoff.
    fn needs_cl(self) -> bool {
        matches!(
            self,
            Experiment::DecoherenceInsufficiency
                | Experiment::Timescales
                | Experiment::BathMatricesValidate
                | Experiment::ConditionalVelocityBimodality
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    CaldeiraLeggett(CaldeiraLeggettParams),
    CustomQuadratic(MasterEqCoefficients),
    FiniteBath { cl: CaldeiraLeggettParams, modes: usize, strategy: DiscretizationStrategy, bath_mass: f64 },
}

impl Model {
    pub fn cl(&self) -> Option<&CaldeiraLeggettParams> {
        match self {
            Model::CaldeiraLeggett(cl) | Model::FiniteBath { cl, .. } => Some(cl),
            Model::CustomQuadratic(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScale {
    Absolute,
    Tc,
    Tloc,
    TtildeC,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub experiments: Vec<Experiment>,
    pub system: OscillatorSystemSpec,
    pub mean_level: usize,
    pub band_width: usize,
    pub coefficients: CoefficientSpec,
    pub model: Model,
    pub times: Vec<f64>,
    pub time_scale: TimeScale,
    /// `(x_half, p_half)` in units of `(x_max, p_max)`, and points per axis.
    pub grid_extent: (f64, f64),
    pub grid_points: (usize, usize),
    pub velocity_points: usize,
    pub velocity_x_fraction: f64,
    pub decoherence_time: f64,
    pub bath_modes: usize,
    pub bath_cl: CaldeiraLeggettParams,
    pub bath_times: Vec<f64>,
    pub bath_step: f64,
    pub triangle_modes: usize,
    /// `k_BT` here is absolute, resolved from `bath.triangle_temperature·ħΩ`.
    pub triangle_cl: CaldeiraLeggettParams,
    pub triangle_time: f64,
    pub bimodality_slices: usize,
    pub bimodality_modes: usize,
    pub bimodality_x_fraction: f64,
    pub bimodality_time_factor: f64,
    pub bimodality_tolerance: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Every key with its resolved value, defaults included.
    pub resolved: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Parse { line: usize, message: String },
    UnknownKey { line: usize, key: String, suggestion: Option<String> },
    Invalid { key: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read scenario: {m}"),
            ConfigError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::UnknownKey { line, key, suggestion: Some(s) } => {
                write!(f, "line {line}: unknown key `{key}` (did you mean `{s}`?)")
            }
            ConfigError::UnknownKey { line, key, suggestion: None } => write!(f, "line {line}: unknown key `{key}`"),
            ConfigError::Invalid { key, message } => write!(f, "invalid `{key}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// `(key, default, description)`; the README table is generated from the same list.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("name", "", "scenario name (required)"),
    ("experiments", "timescales", "comma-separated experiment names"),
    ("seed", "0", "scenario seed; per-task seeds are derived from it"),
    ("output.dir", "out", "output directory, relative to the working directory"),
    ("system.mass", "1", "m"),
    ("system.frequency", "1", "renormalized ω"),
    ("system.hbar", "1", "ħ"),
    ("state.mean_level", "50", "n̄"),
    ("state.band_width", "8", "Δn (even, ≤ 2n̄)"),
    ("state.coefficients", "phase_step", "equal | phase_step | random_phase | explicit"),
    ("state.phase_step", "0.3", "φ for phase_step: c_r ∝ e^{−irφ}"),
    ("state.phase_seed", "0", "seed for random_phase"),
    ("state.explicit", "", "explicit coefficients `re:im, re:im, …` (Δn + 1 entries)"),
    ("model.kind", "caldeira_leggett", "caldeira_leggett | custom_quadratic | finite_bath"),
    ("model.gamma", "1e-4", "γ"),
    ("model.kbt", "1e3", "k_BT"),
    ("model.cutoff", "1e3", "Ω"),
    ("model.table", "", "custom_quadratic: CSV with columns t,h1,h2,h3,gamma,j11,j12,j22"),
    ("model.modes", "256", "finite_bath: number of oscillators; sets the bimodality bath size"),
    ("model.discretization", "midpoint", "finite_bath: midpoint | right_endpoint"),
    ("model.bath_mass", "1", "finite_bath: m_r"),
    ("time.values", "0, 1, 3, 5", "snapshot times"),
    ("time.scale", "t_c", "absolute | t_c | t_loc | t_tilde_c"),
    ("grid.x_extent", "1.5", "grid half-width in x_max"),
    ("grid.p_extent", "1.5", "grid half-height in p_max = mωx_max"),
    ("grid.nx", "301", "points along x"),
    ("grid.np", "301", "points along p"),
    ("velocity.points", "81", "x samples for velocity profiles"),
    ("velocity.x_fraction", "0.8", "profiles cover |x| ≤ x_fraction·x_max"),
    ("decoherence.time", "0.05", "absolute time at which the decoherence factor is applied"),
    ("bath.modes", "8", "bath-matrices-validate: modes of the exact bath"),
    ("bath.gamma", "0.01", "bath-matrices-validate: γ of the exact bath"),
    ("bath.cutoff", "4", "bath-matrices-validate: Ω of the exact bath"),
    ("bath.kbt", "1", "bath-matrices-validate: k_BT of the exact bath"),
    ("bath.times", "1, 5, 10", "bath-matrices-validate: absolute times"),
    ("bath.step", "0.005", "bath-matrices-validate: g-kernel step"),
    ("bath.triangle_modes", "512", "bath-matrices-validate: modes for the reduced-M comparison"),
    ("bath.triangle_gamma", "0.01", "bath-matrices-validate: γ for the reduced-M comparison"),
    ("bath.triangle_cutoff", "2000", "bath-matrices-validate: Ω for the reduced-M comparison"),
    ("bath.triangle_temperature", "100", "bath-matrices-validate: k_BT/(ħΩ) for the reduced-M comparison"),
    ("bath.triangle_time", "0.05", "bath-matrices-validate: absolute time of the reduced-M comparison"),
    ("bimodality.slices", "200", "bath slices"),
    ("bimodality.modes", "256", "oscillators of the sampled bath unless model.kind = finite_bath"),
    ("bimodality.x_fraction", "0.5", "x = x_fraction·x_max"),
    ("bimodality.time_factor", "3", "t = time_factor·t~_c"),
    ("bimodality.tolerance", "0.1", "relative tolerance on |v| = p_cl/m"),
];

fn suggest(key: &str) -> Option<String> {
    let last = key.rsplit('.').next().unwrap_or(key);
    KEYS.iter()
        .map(|(k, _, _)| {
            let tail = k.rsplit('.').next().unwrap_or(k);
            let d = strsim::levenshtein(key, k).min(strsim::levenshtein(last, tail));
            (d, *k)
        })
        .filter(|(d, _)| *d <= 2)
        // ties go to the earlier declaration, so `model.*` beats `bath.*`
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k.to_string())
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Parse { line, message: "empty key".into() });
        }
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(ConfigError::UnknownKey { line, suggestion: suggest(&key), key });
        }
        if let Some((first, _)) = entries.get(&key) {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        entries.insert(key, (line, v.trim().to_string()));
    }
    Ok(entries)
}

struct Lookup {
    values: BTreeMap<String, String>,
}

impl Lookup {
    fn raw(&self, key: &str) -> &str {
        &self.values[key]
    }

    fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key: key.to_string(), message: message.into() }
    }

    fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.raw(key);
        let x: f64 = v.parse().map_err(|_| Self::invalid(key, format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(Self::invalid(key, "must be finite"));
        }
        Ok(x)
    }

    fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let x = self.f64(key)?;
        if x <= 0.0 {
            return Err(Self::invalid(key, format!("must be positive, got {x}")));
        }
        Ok(x)
    }

    fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        let v = self.raw(key);
        v.parse().map_err(|_| Self::invalid(key, format!("`{v}` is not a non-negative integer")))
    }

    fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        let v = self.raw(key);
        v.parse().map_err(|_| Self::invalid(key, format!("`{v}` is not a non-negative integer")))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.raw(key);
        let out: Vec<f64> = v
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Self::invalid(key, format!("`{}` is not a number", s.trim()))))
            .collect::<Result<_, _>>()?;
        if out.is_empty() || out.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Self::invalid(key, "needs one or more finite, non-negative values"));
        }
        Ok(out)
    }
}

/// Parses and validates a scenario file; relative `model.table` paths resolve
/// against the file's directory.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_scenario_str(text: &str, base_dir: &Path) -> Result<Scenario, ConfigError> {
    let given = parse_entries(text)?;
    let mut values: BTreeMap<String, String> = KEYS.iter().map(|(k, d, _)| (k.to_string(), d.to_string())).collect();
    for (k, (_, v)) in given {
        values.insert(k, v);
    }
    let l = Lookup { values };
    fn bad(key: &str, message: impl Into<String>) -> ConfigError {
        Lookup::invalid(key, message)
    }

    let name = l.raw("name").to_string();
    if name.is_empty() {
        return Err(bad("name", "required"));
    }
    let mut experiments = Vec::new();
    for e in l.raw("experiments").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let exp = Experiment::parse(e).ok_or_else(|| {
            let hint = Experiment::ALL
                .iter()
                .map(|x| (strsim::levenshtein(e, x.name()), x.name()))
                .min()
                .filter(|(d, _)| *d <= 3)
                .map(|(_, n)| format!(" (did you mean `{n}`?)"))
                .unwrap_or_default();
            bad("experiments", format!("unknown experiment `{e}`{hint}"))
        })?;
        if !experiments.contains(&exp) {
            experiments.push(exp);
        }
    }
    if experiments.is_empty() {
        return Err(bad("experiments", "at least one experiment is required"));
    }

    let system = OscillatorSystemSpec::new(
        l.positive("system.mass")?,
        l.positive("system.frequency")?,
        l.positive("system.frequency")?,
        l.positive("system.hbar")?,
    )
    .map_err(|e| bad("system", e.to_string()))?;

    let coefficients = match l.raw("state.coefficients") {
        "equal" => CoefficientSpec::Equal,
        "phase_step" => CoefficientSpec::PhaseStep(l.f64("state.phase_step")?),
        "random_phase" => CoefficientSpec::RandomPhase(l.u64("state.phase_seed")?),
        "explicit" => CoefficientSpec::Explicit(
            parse_complex_list(l.raw("state.explicit")).map_err(|m| bad("state.explicit", m))?,
        ),
        other => return Err(bad("state.coefficients", format!("unknown coefficient spec `{other}`"))),
    };
    let mean_level = l.usize("state.mean_level")?;
    let band_width = l.usize("state.band_width")?;
    EnergyBandState::from_spec(mean_level, band_width, &coefficients)
        .map_err(|e| bad("state", format!("EnergyBandState invariant violated: {e}")))?;

    let cl = || -> Result<CaldeiraLeggettParams, ConfigError> {
        CaldeiraLeggettParams::new(l.f64("model.gamma")?, l.f64("model.kbt")?, l.f64("model.cutoff")?)
            .map_err(|e| bad("model", e.to_string()))
    };
    let model = match l.raw("model.kind") {
        "caldeira_leggett" => Model::CaldeiraLeggett(cl()?),
        "finite_bath" => {
            let strategy = match l.raw("model.discretization") {
                "midpoint" => DiscretizationStrategy::Midpoint,
                "right_endpoint" => DiscretizationStrategy::RightEndpoint,
                other => return Err(bad("model.discretization", format!("unknown strategy `{other}`"))),
            };
            let modes = l.usize("model.modes")?;
            if modes == 0 {
                return Err(bad("model.modes", "N ≥ 1 required"));
            }
            Model::FiniteBath { cl: cl()?, modes, strategy, bath_mass: l.positive("model.bath_mass")? }
        }
        "custom_quadratic" => {
            let table = l.raw("model.table");
            if table.is_empty() {
                return Err(bad("model.table", "custom_quadratic needs a coefficient table"));
            }
            Model::CustomQuadratic(read_coefficient_table(&base_dir.join(table)).map_err(|m| bad("model.table", m))?)
        }
        other => return Err(bad("model.kind", format!("unknown model `{other}`"))),
    };
    if let Some(e) = experiments.iter().find(|e| e.needs_cl()) {
        if model.cl().is_none() {
            return Err(bad("model.kind", format!("experiment `{}` needs caldeira_leggett or finite_bath", e.name())));
        }
    }

    let time_scale = match l.raw("time.scale") {
        "absolute" => TimeScale::Absolute,
        "t_c" => TimeScale::Tc,
        "t_loc" => TimeScale::Tloc,
        "t_tilde_c" => TimeScale::TtildeC,
        other => return Err(bad("time.scale", format!("unknown scale `{other}`"))),
    };
    if time_scale != TimeScale::Absolute && model.cl().is_none() {
        return Err(bad("time.scale", "relative time scales need a Caldeira-Leggett model"));
    }

    let fraction = |key: &str| -> Result<f64, ConfigError> {
        let v = l.positive(key)?;
        if v >= 1.0 {
            return Err(bad(key, format!("must lie in (0, 1), got {v}")));
        }
        Ok(v)
    };
    let count = |key: &str, min: usize| -> Result<usize, ConfigError> {
        let v = l.usize(key)?;
        if v < min {
            return Err(bad(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    };
    let bath_modes = count("bath.modes", 1)?;
    if experiments.contains(&Experiment::BathMatricesValidate) && bath_modes > crate::bath_dynamics::DENSE_D_LIMIT {
        return Err(bad(
            "bath.modes",
            format!("dense validation is limited to {} modes", crate::bath_dynamics::DENSE_D_LIMIT),
        ));
    }

    Ok(Scenario {
        name,
        experiments,
        system,
        mean_level,
        band_width,
        coefficients,
        model,
        times: l.list("time.values")?,
        time_scale,
        grid_extent: (l.positive("grid.x_extent")?, l.positive("grid.p_extent")?),
        grid_points: (count("grid.nx", 8)?, count("grid.np", 8)?),
        velocity_points: count("velocity.points", 2)?,
        velocity_x_fraction: fraction("velocity.x_fraction")?,
        decoherence_time: l.positive("decoherence.time")?,
        bath_modes,
        bath_cl: CaldeiraLeggettParams::new(l.f64("bath.gamma")?, l.f64("bath.kbt")?, l.positive("bath.cutoff")?)
            .map_err(|e| bad("bath", e.to_string()))?,
        bath_times: {
            let ts = l.list("bath.times")?;
            if ts.contains(&0.0) {
                return Err(bad("bath.times", "times must be positive"));
            }
            ts
        },
        bath_step: l.positive("bath.step")?,
        triangle_modes: count("bath.triangle_modes", 1)?,
        triangle_cl: {
            let cutoff = l.positive("bath.triangle_cutoff")?;
            let kbt = l.positive("bath.triangle_temperature")? * system.hbar * cutoff;
            CaldeiraLeggettParams::new(l.f64("bath.triangle_gamma")?, kbt, cutoff)
                .map_err(|e| bad("bath.triangle", e.to_string()))?
        },
        triangle_time: l.positive("bath.triangle_time")?,
        bimodality_slices: count("bimodality.slices", 1)?,
        bimodality_modes: count("bimodality.modes", 1)?,
        bimodality_x_fraction: fraction("bimodality.x_fraction")?,
        bimodality_time_factor: l.positive("bimodality.time_factor")?,
        bimodality_tolerance: l.positive("bimodality.tolerance")?,
        seed: l.u64("seed")?,
        output_dir: PathBuf::from(l.raw("output.dir")),
        resolved: l.values,
    })
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let (re, im) = item.split_once(':').unwrap_or((item, "0"));
            match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                (Ok(r), Ok(i)) if r.is_finite() && i.is_finite() => Ok(Complex64::new(r, i)),
                _ => Err(format!("`{item}` is not `re:im`")),
            }
        })
        .collect()
}

const TABLE_COLUMNS: [&str; 8] = ["t", "h1", "h2", "h3", "gamma", "j11", "j12", "j22"];

fn read_coefficient_table(path: &Path) -> Result<MasterEqCoefficients, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let header: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    if header != TABLE_COLUMNS {
        return Err(format!("header must be `{}`", TABLE_COLUMNS.join(",")));
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 8];
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        for (c, field) in rec.iter().enumerate() {
            cols[c].push(field.parse().map_err(|_| format!("row {}: `{field}` is not a number", row + 2))?);
        }
    }
    let t = cols[0].clone();
    let c = |k: usize| Coefficient::table(t.clone(), cols[k].clone()).map_err(|e| e.to_string());
    Ok(MasterEqCoefficients { h1: c(1)?, h2: c(2)?, h3: c(3)?, gamma: c(4)?, j11: c(5)?, j12: c(6)?, j22: c(7)? })
}

impl Scenario {
    /// SHA-256 over the resolved `key = value` lines in key order. The
    /// output directory does not affect results and is left out.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.resolved.iter().filter(|(k, _)| k.as_str() != "output.dir") {
            h.update(format!("{k} = {v}\n").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, ConfigError> {
        parse_scenario_str(text, Path::new("."))
    }

    #[test]
    fn minimal_file_takes_documented_defaults() {
        let s = parse("name = minimal\n").unwrap();
        assert_eq!(s.experiments, vec![Experiment::Timescales]);
        assert_eq!((s.mean_level, s.band_width), (50, 8));
        assert_eq!(s.coefficients, CoefficientSpec::PhaseStep(0.3));
        assert_eq!(s.model, Model::CaldeiraLeggett(CaldeiraLeggettParams::new(1e-4, 1e3, 1e3).unwrap()));
        assert_eq!(s.times, vec![0.0, 1.0, 3.0, 5.0]);
        assert_eq!(s.resolved.len(), KEYS.len());
    }

    #[test]
    fn band_wider_than_twice_the_mean_names_the_invariant() {
        let e = parse("name = x\nstate.mean_level = 3\nstate.band_width = 8\n").unwrap_err();
        assert!(e.to_string().contains("EnergyBandState"), "{e}");
    }

    #[test]
    fn unknown_key_suggests_the_nearest() {
        let e = parse("name = x\ngama = 0.1\n").unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey { line: 2, key: "gama".into(), suggestion: Some("model.gamma".into()) });
        assert!(e.to_string().contains("model.gamma"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse("name = x\n# comment\nnot a pair\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 3, .. }));
        let e = parse("name = x\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 3, .. }));
    }

    #[test]
    fn custom_model_refuses_cl_only_experiments() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("k.csv"),
            "t,h1,h2,h3,gamma,j11,j12,j22\n0,1,1,0,0.01,0,0,0.2\n1,1,1,0,0.01,0,0,0.2\n",
        )
        .unwrap();
        let ok = parse_scenario_str(
            "name = x\nmodel.kind = custom_quadratic\nmodel.table = k.csv\nexperiments = wigner-snapshot\ntime.scale = absolute\n",
            dir.path(),
        )
        .unwrap();
        assert!(matches!(ok.model, Model::CustomQuadratic(_)));
        let e = parse_scenario_str("name = x\nmodel.kind = custom_quadratic\nmodel.table = k.csv\n", dir.path())
            .unwrap_err();
        assert!(e.to_string().contains("timescales"));
    }

    #[test]
    fn hash_depends_on_resolved_values_only() {
        let a = parse("name = x\nseed = 0\n").unwrap();
        let b = parse("name = x\n").unwrap();
        let c = parse("name = x\nseed = 1\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
