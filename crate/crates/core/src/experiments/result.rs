use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported evidence that is not asserted.
    Info,
}

impl Verdict {
    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

/// One statistic of one (strategy, seed, n) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub strategy: String,
    pub seed: Option<u64>,
    pub n: u64,
    pub statistic: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub model: String,
    pub strategies: Vec<String>,
    pub n_grid: Vec<u64>,
    pub seeds: Vec<u64>,
    pub rows: Vec<StatRow>,
    pub notes: Vec<String>,
}

impl ExperimentResult {
    pub fn new(experiment: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            model: model.into(),
            strategies: Vec::new(),
            n_grid: Vec::new(),
            seeds: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// `true` iff no row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StatRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn push(&mut self, row: StatRow) {
        if !self.strategies.contains(&row.strategy) {
            self.strategies.push(row.strategy.clone());
        }
        if let Some(seed) = row.seed {
            if !self.seeds.contains(&seed) {
                self.seeds.push(seed);
            }
        }
        if !self.n_grid.contains(&row.n) {
            self.n_grid.push(row.n);
        }
        self.rows.push(row);
    }

    /// Adds a row that passes iff `ok`.
    #[allow(clippy::too_many_arguments)]
    pub fn check(
        &mut self,
        strategy: &str,
        seed: Option<u64>,
        n: u64,
        statistic: &str,
        value: f64,
        tolerance: f64,
        ok: bool,
    ) {
        self.push(StatRow {
            strategy: strategy.to_string(),
            seed,
            n,
            statistic: statistic.to_string(),
            value,
            tolerance: Some(tolerance),
            verdict: Verdict::from_check(ok),
        });
    }

    pub fn info(&mut self, strategy: &str, seed: Option<u64>, n: u64, statistic: &str, value: f64) {
        self.push(StatRow {
            strategy: strategy.to_string(),
            seed,
            n,
            statistic: statistic.to_string(),
            value,
            tolerance: None,
            verdict: Verdict::Info,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Appends the rows and notes of another result.
    pub fn absorb(&mut self, other: ExperimentResult) {
        for row in other.rows {
            self.push(row);
        }
        self.notes.extend(other.notes);
    }

    /// Rows whose statistic is `name`.
    pub fn rows_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a StatRow> + 'a {
        self.rows.iter().filter(move |r| r.statistic == name)
    }
}
