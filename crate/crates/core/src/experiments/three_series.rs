//! Convergence of `sum X_n` for independent `X_n = a_n X` with `X` drawn
//! from a fixed family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::result::ExperimentResult;
use crate::distribution::{AmbiguitySet, Distribution, Event, Interval, Region};
use crate::error::{Error, Result};
use crate::expectation::event_upper_capacity;
use crate::inequality::{series_verdict, SeriesReport, SeriesVerdict};
use crate::sampler::{oscillation_schedule, simulate, stationary_max, stationary_min, Strategy};

/// Closed-form scale factors `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaledSequence {
    /// `a_n = n^{-exponent}`
    Power { exponent: f64 },
}

impl ScaledSequence {
    pub fn factor(&self, n: u64) -> f64 {
        match *self {
            ScaledSequence::Power { exponent } => (n as f64).powf(-exponent),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSeriesParams {
    pub scales: ScaledSequence,
    pub c: f64,
    pub n: u64,
    pub seeds: Vec<u64>,
    /// Partial-sum horizon of the series verdicts.
    pub series_horizon: usize,
    /// Paths are compared from this index on.
    pub cauchy_start: u64,
    pub cauchy_tolerance: f64,
}

/// `E[(-t) ∨ X ∧ t]` and `E[((-t) ∨ X ∧ t - u)^2]` for one member.
fn truncated_moments(member: &Distribution, t: f64, u: f64) -> (f64, f64) {
    match member {
        Distribution::FiniteDiscrete(d) => (
            d.expect(|x| x[0].clamp(-t, t)),
            d.expect(|x| (x[0].clamp(-t, t) - u).powi(2)),
        ),
        Distribution::TwoSidedPareto(p) => {
            let mean = (2.0 * p.right_mass - 1.0) * p.mean_abs_capped(t);
            (mean, p.second_moment_capped(t) - 2.0 * u * mean + u * u)
        }
    }
}

/// Terms of the three series at index `n`: the tail capacity, the upper and
/// lower truncated means and the upper truncated variance.
fn series_terms(set: &AmbiguitySet, scales: ScaledSequence, c: f64, n: u64) -> Result<[f64; 4]> {
    let a = scales.factor(n);
    let t = c / a;
    let tail = event_upper_capacity(set, &Event::new(0, Region::Outside(Interval::closed(-t, t))))?;
    let means: Vec<f64> = set.members().iter().map(|m| a * truncated_moments(m, t, 0.0).0).collect();
    let upper = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = means.iter().copied().fold(f64::INFINITY, f64::min);
    let variance = set
        .members()
        .iter()
        .map(|m| a * a * truncated_moments(m, t, upper / a).1)
        .fold(0.0, f64::max);
    Ok([tail, upper, lower, variance])
}

fn verdict_code(v: SeriesVerdict) -> f64 {
    match v {
        SeriesVerdict::Convergent => 1.0,
        SeriesVerdict::Divergent => -1.0,
        SeriesVerdict::Inconclusive => 0.0,
    }
}

/// Evaluates the three series and, when they all converge, checks that the
/// partial sums settle under several strategies.
pub fn run_three_series(set: &AmbiguitySet, params: &ThreeSeriesParams) -> Result<ExperimentResult> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    let k = params.series_horizon;
    let terms = (1..=k as u64)
        .into_par_iter()
        .map(|n| series_terms(set, params.scales, params.c, n))
        .collect::<Result<Vec<_>>>()?;
    let report = |j: usize| -> SeriesReport { series_verdict(|i| terms[i - 1][j], k) };
    let names = ["s1_tail_capacity", "s2_upper_truncated_mean", "s2_lower_truncated_mean", "s3_truncated_variance"];
    let mut result = ExperimentResult::new("three_series", set.label());
    result.note(format!("scales {:?}, c = {}", params.scales, params.c));
    let mut all = true;
    for (j, name) in names.iter().enumerate() {
        let r = report(j);
        all &= r.verdict == SeriesVerdict::Convergent;
        result.info("-", None, k as u64, &format!("{name}_partial_sum"), r.partial_sum);
        result.info("-", None, k as u64, &format!("{name}_verdict"), verdict_code(r.verdict));
    }
    result.info("-", None, k as u64, "three_series_convergent", f64::from(u8::from(all)));

    let strategies: Vec<Strategy> = if set.len() > 1 {
        vec![
            stationary_max(set)?,
            stationary_min(set)?,
            oscillation_schedule(set, 64)?,
            Strategy::stationary("uniform", vec![1.0 / set.len() as f64; set.len()]),
        ]
    } else {
        vec![Strategy::pure("only", 1, 0)]
    };
    let n = params.n;
    let start = params.cauchy_start;
    let jobs: Vec<(&Strategy, u64)> = strategies
        .iter()
        .flat_map(|s| params.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let runs = jobs
        .into_par_iter()
        .map(|(st, seed)| -> Result<(String, u64, f64, u64)> {
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut big = 0u64;
            simulate(set, st, n as usize, seed, |t| params.scales.factor(t), |t, x, s| {
                if t >= start {
                    hi = hi.max(s[0]);
                    lo = lo.min(s[0]);
                }
                if x[0].abs() > params.c {
                    big += 1;
                }
            })?;
            Ok((st.label.clone(), seed, hi - lo, big))
        })
        .collect::<Result<Vec<_>>>()?;
    for (label, seed, fluctuation, big) in runs {
        if all {
            let tol = params.cauchy_tolerance;
            result.check(&label, Some(seed), n, "tail_fluctuation", fluctuation, tol, fluctuation <= tol);
        } else {
            result.info(&label, Some(seed), n, "tail_fluctuation", fluctuation);
            result.info(&label, Some(seed), n, "increments_above_c", big as f64);
        }
    }
    Ok(result)
}
