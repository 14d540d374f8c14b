//! Run configuration: a strict JSON schema with every default written out
//! in the resolved form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distribution::{AmbiguitySet, Atom, Distribution};
use crate::experiments::ScaledSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Slln,
    Marcinkiewicz,
    WeakLln,
    ThreeSeries,
    ClusterSet,
    InequalityGrid,
    ChoquetSeries,
    Axioms,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Slln => "slln",
            ExperimentId::Marcinkiewicz => "marcinkiewicz",
            ExperimentId::WeakLln => "weak_lln",
            ExperimentId::ThreeSeries => "three_series",
            ExperimentId::ClusterSet => "cluster_set",
            ExperimentId::InequalityGrid => "inequality_grid",
            ExperimentId::ChoquetSeries => "choquet_series",
            ExperimentId::Axioms => "axioms",
        }
    }
}

/// A scalar or a vector atom location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub value: AtomValue,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParetoSpec {
    pub alpha: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "half")]
    pub right_mass: f64,
}

/// One member: either `atoms` or `pareto`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pareto: Option<ParetoSpec>,
}

/// A model given by a preset name (`E1`, `V2`, `V2-mix`) or by members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<MemberSpec>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakLlnMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub mean: f64,
    pub oscillation: f64,
    pub capacity: f64,
    pub interior: f64,
    pub bank: f64,
    pub envelope: f64,
    pub cauchy: f64,
    pub outer: f64,
    pub hausdorff: f64,
    /// Fraction of the horizon discarded before running extremes.
    pub burn_in: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mean: 0.01,
            oscillation: 0.05,
            capacity: 0.05,
            interior: 0.9,
            bank: 0.05,
            envelope: 0.5,
            cauchy: 0.01,
            outer: 0.05,
            hausdorff: 0.15,
            burn_in: 0.01,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// Everything a run needs. Unknown keys are rejected; missing keys take the
/// defaults below, and the resolved config lists them all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentId,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    /// Lattice quantum for exact computations; inferred when absent.
    #[serde(default)]
    pub quantum: Option<f64>,
    #[serde(default = "RunConfig::default_n")]
    pub n: u64,
    #[serde(default = "RunConfig::default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "RunConfig::default_n_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default = "RunConfig::default_divergence_grid")]
    pub divergence_grid: Vec<u64>,
    #[serde(default = "RunConfig::default_inequality_n_grid")]
    pub inequality_n_grid: Vec<u64>,
    #[serde(default = "RunConfig::default_x_grid")]
    pub x_grid: Vec<f64>,
    #[serde(default = "RunConfig::default_y_ratios")]
    pub y_ratios: Vec<f64>,
    #[serde(default = "RunConfig::default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "RunConfig::default_p")]
    pub p: f64,
    #[serde(default = "one")]
    pub series_m: f64,
    #[serde(default = "RunConfig::default_series_horizon")]
    pub series_horizon: usize,
    #[serde(default = "RunConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "RunConfig::default_weak_lln_mode")]
    pub weak_lln_mode: WeakLlnMode,
    #[serde(default = "RunConfig::default_replicates")]
    pub replicates: usize,
    #[serde(default = "RunConfig::default_targets")]
    pub targets: usize,
    #[serde(default = "RunConfig::default_delta")]
    pub delta: f64,
    #[serde(default = "RunConfig::default_scales")]
    pub scales: ScaledSequence,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "RunConfig::default_cauchy_start")]
    pub cauchy_start: u64,
    #[serde(default = "RunConfig::default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "RunConfig::default_output_dir")]
    pub output_dir: String,
}

impl RunConfig {
    fn default_n() -> u64 {
        1_000_000
    }
    fn default_seeds() -> Vec<u64> {
        vec![1, 2, 3]
    }
    fn default_n_grid() -> Vec<u64> {
        vec![32, 64, 128, 256]
    }
    fn default_divergence_grid() -> Vec<u64> {
        vec![1_000, 10_000, 100_000]
    }
    fn default_inequality_n_grid() -> Vec<u64> {
        vec![4, 8, 16]
    }
    fn default_x_grid() -> Vec<f64> {
        vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]
    }
    fn default_y_ratios() -> Vec<f64> {
        vec![1.0, 0.5]
    }
    fn default_alpha_grid() -> Vec<f64> {
        vec![0.3, 0.5]
    }
    fn default_p() -> f64 {
        1.5
    }
    fn default_series_horizon() -> usize {
        10_000
    }
    fn default_epsilon() -> f64 {
        0.1
    }
    fn default_weak_lln_mode() -> WeakLlnMode {
        WeakLlnMode::Exact
    }
    fn default_replicates() -> usize {
        200
    }
    fn default_targets() -> usize {
        5
    }
    fn default_delta() -> f64 {
        0.01
    }
    fn default_scales() -> ScaledSequence {
        ScaledSequence::Power { exponent: 2.0 }
    }
    fn default_cauchy_start() -> u64 {
        1_000
    }
    fn default_trials() -> u64 {
        1_000
    }
    fn default_output_dir() -> String {
        "results".to_string()
    }

    /// A config for `experiment` with every default and no model. Not
    /// validated.
    pub fn defaults(experiment: ExperimentId) -> Self {
        serde_json::from_value(serde_json::json!({ "experiment": experiment })).expect("defaults deserialise")
    }

    /// Builds the ambiguity set described by `model`.
    pub fn ambiguity_set(&self) -> Result<AmbiguitySet, ConfigError> {
        let spec = self
            .model
            .as_ref()
            .ok_or_else(|| ConfigError::value("model", format!("experiment {} needs a model", self.experiment.as_str())))?;
        build_model(spec)
    }

    /// Pretty JSON of the resolved config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    /// The document does not fit the schema.
    Schema { path: String, message: String },
    /// A field fits the schema but its value is invalid.
    Value { path: String, message: String },
}

impl ConfigError {
    fn value(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Value {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Schema { .. } => "SchemaError",
            ConfigError::Value { .. } => "ValueError",
        }
    }

    pub fn path(&self) -> &str {
        match self {
            ConfigError::Schema { path, .. } | ConfigError::Value { path, .. } => path,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            ConfigError::Schema { message, .. } | ConfigError::Value { message, .. } => message,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at `{}`: {}", self.kind(), self.path(), self.message())
    }
}

impl std::error::Error for ConfigError {}

fn build_model(spec: &ModelSpec) -> Result<AmbiguitySet, ConfigError> {
    let set = match (&spec.preset, &spec.members) {
        (Some(_), Some(_)) => return Err(ConfigError::value("model", "give either `preset` or `members`, not both")),
        (None, None) => return Err(ConfigError::value("model", "give `preset` or `members`")),
        (Some(name), None) => match name.as_str() {
            "E1" => AmbiguitySet::coin_pair(),
            "V2" => AmbiguitySet::unit_pair(),
            "V2-mix" => AmbiguitySet::unit_pair_with_mix(),
            other => {
                return Err(ConfigError::value(
                    "model.preset",
                    format!("unknown preset {other:?}; expected E1, V2 or V2-mix"),
                ))
            }
        },
        (None, Some(members)) => {
            let mut dists = Vec::with_capacity(members.len());
            for (i, m) in members.iter().enumerate() {
                let path = format!("model.members[{i}]");
                let d = match (&m.atoms, &m.pareto) {
                    (Some(atoms), None) => {
                        let atoms = atoms
                            .iter()
                            .map(|a| match &a.value {
                                AtomValue::Scalar(v) => Atom::scalar(*v, a.weight),
                                AtomValue::Vector(v) => Atom::new(v.clone(), a.weight),
                            })
                            .collect();
                        Distribution::discrete(atoms)
                            .map_err(|e| ConfigError::value(format!("{path}.atoms"), e.to_string()))?
                    }
                    (None, Some(p)) => Distribution::pareto(p.alpha, p.scale, p.right_mass)
                        .map_err(|e| ConfigError::value(format!("{path}.pareto"), e.to_string()))?,
                    _ => return Err(ConfigError::value(path, "give exactly one of `atoms` and `pareto`")),
                };
                dists.push(d);
            }
            AmbiguitySet::new("custom", dists).map_err(|e| ConfigError::value("model.members", e.to_string()))?
        }
    };
    Ok(match &spec.label {
        Some(label) => set.relabeled(label.clone()),
        None => set,
    })
}

fn check(ok: bool, path: &str, message: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::value(path, message))
    }
}

fn validate(c: &RunConfig) -> Result<(), ConfigError> {
    check(c.n >= 1, "n", "must be at least 1")?;
    check(!c.seeds.is_empty(), "seeds", "must not be empty")?;
    for (name, grid) in [
        ("n_grid", &c.n_grid),
        ("divergence_grid", &c.divergence_grid),
        ("inequality_n_grid", &c.inequality_n_grid),
    ] {
        check(!grid.is_empty() && grid.iter().all(|&v| v >= 1), name, "must be a nonempty list of positive integers")?;
    }
    for (name, grid) in [("x_grid", &c.x_grid), ("y_ratios", &c.y_ratios)] {
        check(!grid.is_empty() && grid.iter().all(|&v| v > 0.0 && v.is_finite()), name, "must be a nonempty list of positive numbers")?;
    }
    check(c.alpha_grid.iter().all(|&a| a > 0.0 && a < 1.0), "alpha_grid", "entries must lie in (0, 1)")?;
    check(c.p >= 1.0 && c.p < 2.0, "p", format!("must lie in [1, 2), got {}", c.p))?;
    if c.experiment == ExperimentId::Marcinkiewicz {
        check(c.p > 1.0, "p", "must exceed 1 for marcinkiewicz")?;
    }
    check(c.series_m > 0.0, "series_m", "must be positive")?;
    check(c.series_horizon >= 1000, "series_horizon", "must be at least 1000")?;
    check(c.epsilon > 0.0, "epsilon", "must be positive")?;
    check(c.replicates >= 1, "replicates", "must be at least 1")?;
    check(c.targets >= 1, "targets", "must be at least 1")?;
    check(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)")?;
    check(c.c > 0.0, "c", "must be positive")?;
    check(c.trials >= 1, "trials", "must be at least 1")?;
    if let Some(q) = c.quantum {
        check(q > 0.0 && q.is_finite(), "quantum", "must be positive")?;
    }
    let t = &c.tolerances;
    for (name, v) in [
        ("tolerances.mean", t.mean),
        ("tolerances.oscillation", t.oscillation),
        ("tolerances.capacity", t.capacity),
        ("tolerances.interior", t.interior),
        ("tolerances.bank", t.bank),
        ("tolerances.envelope", t.envelope),
        ("tolerances.cauchy", t.cauchy),
        ("tolerances.outer", t.outer),
        ("tolerances.hausdorff", t.hausdorff),
    ] {
        check(v >= 0.0 && v.is_finite(), name, "must be a nonnegative number")?;
    }
    check(t.burn_in > 0.0 && t.burn_in < 1.0, "tolerances.burn_in", "must lie in (0, 1)")?;
    if c.experiment != ExperimentId::Axioms {
        c.ambiguity_set()?;
    }
    Ok(())
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Schema {
            path: if path == "." { String::new() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    validate(&config)?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_materialised() {
        let c = parse_config(r#"{"experiment": "slln", "model": {"preset": "E1"}}"#).unwrap();
        assert_eq!(c.n, 1_000_000);
        assert_eq!(c.seeds, vec![1, 2, 3]);
        let resolved = c.to_json();
        assert!(resolved.contains("\"epsilon\": 0.1"));
        assert_eq!(parse_config(&resolved).unwrap(), c);
    }

    #[test]
    fn bad_weights_are_value_errors() {
        let text = r#"{"experiment": "slln", "model": {"members": [
            {"atoms": [{"value": 1, "weight": 0.49}, {"value": -1, "weight": 0.5}]}]}}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.kind(), "ValueError");
        assert_eq!(e.path(), "model.members[0].atoms");
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let e = parse_config(r#"{"experiment": "slln", "modle": {"preset": "E1"}}"#).unwrap_err();
        assert_eq!(e.kind(), "SchemaError");
        assert!(e.message().contains("modle"));
        let e = parse_config(r#"{"experiment": "slln", "tolerances": {"mena": 1}}"#).unwrap_err();
        assert_eq!(e.kind(), "SchemaError");
        assert_eq!(e.path(), "tolerances.mena");
    }

    #[test]
    fn inline_members() {
        let text = r#"{"experiment": "marcinkiewicz", "model": {"label": "mixed", "members": [
            {"atoms": [{"value": [1, 0], "weight": 1}]},
            {"atoms": [{"value": [0, 1], "weight": 1}]}]}}"#;
        let c = parse_config(text).unwrap();
        let set = c.ambiguity_set().unwrap();
        assert_eq!((set.len(), set.dim(), set.label()), (2, 2, "mixed"));
        let text = r#"{"experiment": "slln", "model": {"members": [{"pareto": {"alpha": 0.9}}]}}"#;
        assert!(parse_config(text).unwrap().ambiguity_set().unwrap().members()[0].as_discrete().is_none());
    }
}
