//! Runs a [`RunConfig`] and writes its artefacts.
//!
//! A run directory holds `resolved_config.json`, `results.json` and
//! `results.csv`; runs that do not exit with code 0 also leave a
//! `failure.json`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, ExperimentId, RunConfig, WeakLlnMode};
use crate::distribution::AmbiguitySet;
use crate::dp::LatticeModel;
use crate::error::Error;
use crate::experiments::{
    run_choquet_series, run_cluster_set, run_divergence, run_inequality_grid, run_marcinkiewicz, run_slln,
    run_three_series, run_weak_lln, run_weak_lln_mc, ClusterParams, ExperimentResult, InequalityGridParams,
    MarcinkiewiczParams, SllnParams, StatRow, ThreeSeriesParams, WeakLlnMcParams, WeakLlnParams,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const CSV_HEADER: [&str; 9] = [
    "run_id",
    "experiment",
    "strategy",
    "seed",
    "n",
    "statistic",
    "value",
    "tolerance",
    "verdict",
];

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(#[from] Error),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(e) => e.kind(),
            RunError::Compute(_) => "ComputeError",
            RunError::Io { .. } => "IoError",
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        RunError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Options that override the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Replaces the seed list with this single seed.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub experiment: Option<ExperimentId>,
    pub trials: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.seeds = vec![seed];
        }
        if let Some(out) = &self.out {
            config.output_dir = out.display().to_string();
        }
        if let Some(threads) = self.threads {
            config.threads = threads;
        }
        if let Some(experiment) = self.experiment {
            config.experiment = experiment;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
    }
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run_id: String,
    pub config: RunConfig,
    pub result: ExperimentResult,
    pub exit_code: i32,
}

/// First 16 hex digits of the SHA-256 of the resolved config, ignoring
/// `threads` and `output_dir`.
pub fn run_id(config: &RunConfig) -> String {
    let mut key = config.clone();
    key.threads = 0;
    key.output_dir = String::new();
    let digest = Sha256::digest(serde_json::to_vec(&key).expect("config serialises"));
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn lattice(config: &mut RunConfig, set: &AmbiguitySet) -> Result<LatticeModel, Error> {
    let model = match config.quantum {
        Some(q) => LatticeModel::new(set, q)?,
        None => LatticeModel::inferred(set)?,
    };
    config.quantum = Some(model.quantum());
    Ok(model)
}

/// Fills inferred fields and runs the experiment. Lattice quanta are written
/// back into `config`.
pub fn run_experiment(config: &mut RunConfig) -> Result<ExperimentResult, RunError> {
    let tol = config.tolerances.clone();
    if config.experiment == ExperimentId::Axioms {
        return Ok(crate::axioms::run_axioms(config.trials, config.seeds[0])?);
    }
    let set = config.ambiguity_set()?;
    let result = match config.experiment {
        ExperimentId::Slln => {
            let params = SllnParams {
                n: config.n,
                seeds: config.seeds.clone(),
                mean_tolerance: tol.mean,
                oscillation_tolerance: tol.oscillation,
                targets: config.targets,
                burn_in: tol.burn_in,
            };
            match run_slln(&set, &params) {
                Err(Error::NotConvergent(why)) => {
                    let mut r = run_divergence(&set, &config.divergence_grid, &config.seeds)?;
                    r.note(format!("strong law not applicable: {why}"));
                    r
                }
                other => other?,
            }
        }
        ExperimentId::Marcinkiewicz => run_marcinkiewicz(
            &set,
            &MarcinkiewiczParams {
                p: config.p,
                n: config.n,
                seeds: config.seeds.clone(),
                envelope: tol.envelope,
                burn_in: tol.burn_in,
                series_horizon: config.series_horizon,
            },
        )?,
        ExperimentId::WeakLln => match config.weak_lln_mode {
            WeakLlnMode::Exact => {
                if set.dim() != 1 {
                    return Err(Error::Unsupported(format!(
                        "exact mode requires d=1, model has d={}; use weak_lln_mode = monte_carlo",
                        set.dim()
                    ))
                    .into());
                }
                let model = lattice(config, &set)?;
                run_weak_lln(
                    &model,
                    &WeakLlnParams {
                        n_grid: config.n_grid.clone(),
                        epsilon: config.epsilon,
                        capacity_threshold: tol.capacity,
                        interior_threshold: tol.interior,
                        bank_tolerance: tol.bank,
                    },
                )?
            }
            WeakLlnMode::MonteCarlo => run_weak_lln_mc(
                &set,
                &WeakLlnMcParams {
                    n_grid: config.n_grid.clone(),
                    epsilon: config.epsilon,
                    capacity_threshold: tol.capacity,
                    replicates: config.replicates,
                    seed: config.seeds[0],
                    delta: config.delta,
                },
            )?,
        },
        ExperimentId::ThreeSeries => run_three_series(
            &set,
            &ThreeSeriesParams {
                scales: config.scales,
                c: config.c,
                n: config.n,
                seeds: config.seeds.clone(),
                series_horizon: config.series_horizon,
                cauchy_start: config.cauchy_start,
                cauchy_tolerance: tol.cauchy,
            },
        )?,
        ExperimentId::ClusterSet => run_cluster_set(
            &set,
            &ClusterParams {
                targets: config.targets,
                n: config.n,
                seeds: config.seeds.clone(),
                delta: config.delta,
                outer_tolerance: tol.outer,
                hausdorff_tolerance: tol.hausdorff,
                burn_in: tol.burn_in,
            },
        )?,
        ExperimentId::InequalityGrid => {
            let model = lattice(config, &set)?;
            run_inequality_grid(
                &model,
                &InequalityGridParams {
                    n_grid: config.inequality_n_grid.clone(),
                    x_grid: config.x_grid.clone(),
                    y_ratios: config.y_ratios.clone(),
                    alpha_grid: config.alpha_grid.clone(),
                },
            )?
        }
        ExperimentId::ChoquetSeries => run_choquet_series(&set, config.p, config.series_m, config.series_horizon)?,
        ExperimentId::Axioms => unreachable!(),
    };
    Ok(result)
}

/// Runs on a pool of `config.threads` workers (0 for all cores).
pub fn run_in_pool(config: &mut RunConfig) -> Result<ExperimentResult, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// The rows as CSV text.
pub fn results_csv(run_id: &str, result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &result.rows {
        w.write_record([
            run_id.to_string(),
            result.experiment.clone(),
            row.strategy.clone(),
            row.seed.map(|s| s.to_string()).unwrap_or_default(),
            row.n.to_string(),
            row.statistic.clone(),
            fmt_float(row.value),
            row.tolerance.map(fmt_float).unwrap_or_default(),
            row.verdict.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Serialize)]
struct ResultsFile<'a> {
    run_id: &'a str,
    passed: bool,
    config: &'a RunConfig,
    result: &'a ExperimentResult,
}

#[derive(Serialize)]
struct FailureFile<'a> {
    exit_code: i32,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
    message: String,
    failed_rows: Vec<&'a StatRow>,
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), RunError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| RunError::io(&path, e))
}

fn write_failure(dir: &Path, failure: &FailureFile<'_>) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    write(dir, "failure.json", &serde_json::to_string_pretty(failure).expect("failure serialises"))
}

/// Runs a parsed config and writes every artefact into its output
/// directory.
pub fn execute(mut config: RunConfig) -> Result<RunOutcome, RunError> {
    let dir = PathBuf::from(&config.output_dir);
    let result = match run_in_pool(&mut config) {
        Ok(r) => r,
        Err(e) => {
            let _ = write_failure(
                &dir,
                &FailureFile {
                    exit_code: EXIT_ERROR,
                    kind: e.kind(),
                    path: None,
                    message: e.to_string(),
                    failed_rows: Vec::new(),
                },
            );
            return Err(e);
        }
    };
    let id = run_id(&config);
    fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
    let failure = dir.join("failure.json");
    if failure.exists() {
        fs::remove_file(&failure).map_err(|e| RunError::io(&failure, e))?;
    }
    write(&dir, "resolved_config.json", &config.to_json())?;
    let file = ResultsFile {
        run_id: &id,
        passed: result.passed(),
        config: &config,
        result: &result,
    };
    write(&dir, "results.json", &serde_json::to_string_pretty(&file).expect("results serialise"))?;
    write(&dir, "results.csv", &results_csv(&id, &result))?;
    let exit_code = if result.passed() { EXIT_PASS } else { EXIT_FAIL };
    if exit_code != EXIT_PASS {
        let failed: Vec<&StatRow> = result.failures().collect();
        write_failure(
            &dir,
            &FailureFile {
                exit_code,
                kind: "VerdictFailure",
                path: None,
                message: format!("{} of {} rows failed", failed.len(), result.rows.len()),
                failed_rows: failed,
            },
        )?;
    }
    Ok(RunOutcome {
        run_id: id,
        config,
        result,
        exit_code,
    })
}

/// Reads, overrides and executes a config file. Errors before the output
/// directory is known are written under `overrides.out`, if given.
pub fn execute_file(path: &Path, overrides: &Overrides) -> Result<RunOutcome, RunError> {
    let fail_early = |e: RunError| {
        if let Some(dir) = &overrides.out {
            let (kind, at) = match &e {
                RunError::Config(c) => (c.kind(), Some(c.path())),
                other => (other.kind(), None),
            };
            let _ = write_failure(
                dir,
                &FailureFile {
                    exit_code: EXIT_ERROR,
                    kind,
                    path: at,
                    message: e.to_string(),
                    failed_rows: Vec::new(),
                },
            );
        }
        e
    };
    let text = fs::read_to_string(path).map_err(|e| fail_early(RunError::io(path, e)))?;
    let mut config = parse_config(&text).map_err(|e| fail_early(e.into()))?;
    overrides.apply(&mut config);
    execute(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_id_ignores_threads_and_output() {
        let mut a = RunConfig::defaults(ExperimentId::Axioms);
        let id = run_id(&a);
        assert_eq!(id.len(), 16);
        a.threads = 8;
        a.output_dir = "elsewhere".into();
        assert_eq!(run_id(&a), id);
        a.trials = 3;
        assert_ne!(run_id(&a), id);
    }

    #[test]
    fn csv_format() {
        let mut r = ExperimentResult::new("x", "m");
        r.check("s", Some(4), 10, "stat", 0.1, 0.5, true);
        r.info("s", None, 10, "other", 2.0);
        let text = results_csv("abc", &r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "abc,x,s,4,10,stat,1.0000000000000001e-1,5.0000000000000000e-1,pass");
        assert_eq!(lines[2], "abc,x,s,,10,other,2.0000000000000000e0,,info");
    }

    #[test]
    fn exact_weak_law_needs_one_dimension() {
        let mut c = parse_config(r#"{"experiment": "weak_lln", "model": {"members": [
            {"atoms": [{"value": [1, 0], "weight": 1}]}]}}"#)
        .unwrap();
        let e = run_experiment(&mut c).unwrap_err();
        assert!(e.to_string().contains("exact mode requires d=1"), "{e}");
    }

    #[test]
    fn quantum_is_resolved() {
        let mut c = parse_config(r#"{"experiment": "inequality_grid", "model": {"preset": "E1"},
            "inequality_n_grid": [4], "x_grid": [2], "alpha_grid": [0.5], "y_ratios": [1]}"#)
        .unwrap();
        assert_eq!(c.quantum, None);
        let r = run_experiment(&mut c).unwrap();
        assert_eq!(c.quantum, Some(1.0));
        assert!(r.passed());
    }
}
