//! Scenario-driven front end: `bohmdec run | validate | list-experiments`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure inside an experiment.

mod experiments;
mod output;
mod scenario;

pub use experiments::{
    reduced_m_triangle, run_experiments, ExperimentError, ExperimentOutput, INVARIANCE_TOLERANCE, TRIANGLE_TOLERANCE,
};
pub use output::{created_at, csv_artifact, format_f64, git_rev, json_artifact, json_bytes, Artifact, Cell};
pub use scenario::{
    parse_entries, parse_scenario, parse_scenario_str, ConfigError, Experiment, Model, Scenario, TimeScale, KEYS,
};

use clap::{Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Experiment(ExperimentError),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(_) => 1,
            RunError::Config(_) => 2,
            RunError::Experiment(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Experiment(e) => write!(f, "experiment failed: {e}"),
            RunError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario_name: &'a str,
    experiment: &'static str,
    scenario_hash: String,
    seed: u64,
    task_seeds: &'a BTreeMap<String, u64>,
    git_rev: String,
    created_at: String,
    version: &'static str,
    /// Every resolved key; together with `version` this reruns the experiment exactly.
    scenario: &'a BTreeMap<String, String>,
    /// SHA-256 of each artifact.
    files: BTreeMap<String, String>,
}

/// Applies `--out` and `--seed` overrides, keeping `resolved` (and so the hash) in step.
pub fn apply_overrides(sc: &mut Scenario, out: Option<PathBuf>, seed: Option<u64>) {
    if let Some(out) = out {
        sc.resolved.insert("output.dir".into(), out.display().to_string());
        sc.output_dir = out;
    }
    if let Some(seed) = seed {
        sc.resolved.insert("seed".into(), seed.to_string());
        sc.seed = seed;
    }
}

/// Computes every experiment, then writes `<output.dir>/<name>/<experiment>/`
/// with a `manifest.json` each. Returns the directories written.
pub fn run_scenario(sc: &Scenario) -> Result<Vec<PathBuf>, RunError> {
    let outputs = run_experiments(sc).map_err(RunError::Experiment)?;
    let (hash, rev, when) = (sc.hash(), git_rev(), created_at());
    let mut dirs = Vec::new();
    for out in &outputs {
        let manifest = Manifest {
            scenario_name: &sc.name,
            experiment: out.experiment.name(),
            scenario_hash: hash.clone(),
            seed: sc.seed,
            task_seeds: &out.task_seeds,
            git_rev: rev.clone(),
            created_at: when.clone(),
            version: env!("CARGO_PKG_VERSION"),
            scenario: &sc.resolved,
            files: out.artifacts.iter().map(|a| (a.file.clone(), a.sha256())).collect(),
        };
        let mut artifacts = out.artifacts.clone();
        artifacts.push(json_artifact("manifest.json", &manifest));
        let dir = sc.output_dir.join(&sc.name).join(out.experiment.name());
        output::write_all(&dir, &artifacts).map_err(RunError::Io)?;
        dirs.push(dir);
    }
    Ok(dirs)
}

#[derive(Parser, Debug)]
#[command(
    name = "bohmdec",
    version,
    about = "Decoherence and Bohmian velocities of an oscillator in a quantum Brownian bath"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every experiment listed in a scenario file.
    Run {
        scenario: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenario seed; overrides `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; falls back to BOHMDEC_THREADS, then to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a scenario file without computing anything.
    Validate { scenario: PathBuf },
    /// List experiment names with one-line descriptions.
    ListExperiments,
}

fn configure_threads(threads: Option<usize>) -> Result<(), RunError> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("BOHMDEC_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                RunError::Config(ConfigError::Invalid {
                    key: "BOHMDEC_THREADS".into(),
                    message: format!("`{v}` is not a count"),
                })
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        // a second build in the same process fails; the first pool stays in force
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn load(path: &Path) -> Result<Scenario, RunError> {
    parse_scenario(path).map_err(RunError::Config)
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<34}{}", e.name(), e.description());
            }
            Ok(())
        }
        Command::Validate { scenario } => load(&scenario).map(|sc| {
            println!("{}: valid ({} experiments, hash {})", sc.name, sc.experiments.len(), sc.hash());
        }),
        Command::Run { scenario, out, seed, threads } => configure_threads(threads)
            .and_then(|_| load(&scenario))
            .and_then(|mut sc| {
                apply_overrides(&mut sc, out, seed);
                run_scenario(&sc)
            })
            .map(|dirs| {
                for d in dirs {
                    println!("{}", d.display());
                }
            }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bohmdec: {e}");
            e.exit_code()
        }
    }
}
