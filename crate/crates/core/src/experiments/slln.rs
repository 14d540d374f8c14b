//! Strong laws along simulated paths: endpoints of the mean interval,
//! oscillation between them, every interior target, heavy-tail divergence
//! and Marcinkiewicz rates.

use rayon::prelude::*;

use super::result::ExperimentResult;
use crate::distribution::AmbiguitySet;
use crate::error::{Error, Result};
use crate::expectation::{breve_expectation, choquet_integral, upper_second_moment, Transform};
use crate::inequality::{choquet_series_test, SeriesVerdict};
use crate::sampler::{
    oscillation_schedule_with, simulate, stationary_for_target, stationary_max, stationary_min, BlockGrowth, Strategy,
};

/// Tolerance of the doubling search for the mean interval.
const MEAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SllnParams {
    pub n: u64,
    pub seeds: Vec<u64>,
    /// Allowed gap between `S_N/N` and its limit.
    pub mean_tolerance: f64,
    /// Allowed gap between the running extremes and the interval ends.
    pub oscillation_tolerance: f64,
    /// Number of grid targets in the mean interval.
    pub targets: usize,
    /// Running extremes are taken over `n >= burn_in * N`.
    pub burn_in: f64,
}

/// Extremes of `S_n / n` over `n >= from`, and the final average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageSummary {
    pub last: f64,
    pub max: f64,
    pub min: f64,
}

/// Streams one path and summarises its averages.
pub fn average_summary(set: &AmbiguitySet, strategy: &Strategy, n: u64, seed: u64, from: u64) -> Result<AverageSummary> {
    let mut s = AverageSummary {
        last: 0.0,
        max: f64::NEG_INFINITY,
        min: f64::INFINITY,
    };
    simulate(set, strategy, n as usize, seed, |_| 1.0, |t, _, sum| {
        let avg = sum[0] / t as f64;
        if t >= from {
            s.max = s.max.max(avg);
            s.min = s.min.min(avg);
        }
        s.last = avg;
    })?;
    Ok(s)
}

fn burn_in_start(n: u64, fraction: f64) -> u64 {
    ((n as f64 * fraction).ceil() as u64).max(1)
}

/// Runs every strategy on every seed in parallel; results keep input order.
fn run_all<T: Send>(
    strategies: &[Strategy],
    seeds: &[u64],
    f: impl Fn(&Strategy, u64) -> Result<T> + Sync,
) -> Result<Vec<(String, u64, T)>> {
    let jobs: Vec<(&Strategy, u64)> = strategies
        .iter()
        .flat_map(|s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    jobs.into_par_iter()
        .map(|(s, seed)| f(s, seed).map(|v| (s.label.clone(), seed, v)))
        .collect()
}

/// The strong law: paths under the extreme stationary strategies settle at
/// the ends of the mean interval, an oscillating schedule visits both ends,
/// and a stationary mixture settles at any chosen interior point.
pub fn run_slln(set: &AmbiguitySet, params: &SllnParams) -> Result<ExperimentResult> {
    let means = breve_expectation(set, MEAN_TOL)?;
    if !means.converged {
        return Err(Error::NotConvergent(format!("truncated means of {} do not settle", set.label())));
    }
    let (upper, lower) = (means.upper_mean, means.lower_mean);
    let n = params.n;
    let from = burn_in_start(n, params.burn_in);
    let mut result = ExperimentResult::new("slln", set.label());
    result.note(format!("mean interval [{}, {}]; running extremes over n >= {from}", lower + 0.0, upper + 0.0));

    let extremes = [stationary_max(set)?, stationary_min(set)?];
    let runs = run_all(&extremes, &params.seeds, |st, seed| average_summary(set, st, n, seed, from))?;
    for (label, seed, s) in &runs {
        let target = if *label == extremes[0].label { upper } else { lower };
        let gap = (s.last - target).abs();
        result.check(label, Some(*seed), n, "final_average_gap", gap, params.mean_tolerance, gap <= params.mean_tolerance);
    }
    if upper - lower > params.mean_tolerance {
        // A nondegenerate interval means different strategies have
        // different limits.
        let per = params.seeds.len();
        for (i, &seed) in params.seeds.iter().enumerate() {
            let spread = runs[i].2.last - runs[per + i].2.last;
            let need = 0.5 * (upper - lower);
            result.check("max-vs-min", Some(seed), n, "limit_spread", spread, need, spread >= need);
        }
    }

    let blocks = BlockGrowth::Triangular.blocks_to_reach(n).max(2);
    let oscillation = oscillation_schedule_with(set, blocks, BlockGrowth::Triangular)?;
    for (label, seed, s) in run_all(&[oscillation], &params.seeds, |st, seed| average_summary(set, st, n, seed, from))? {
        let tol = params.oscillation_tolerance;
        result.check(&label, Some(seed), n, "running_max_average", s.max, tol, s.max >= upper - tol);
        result.check(&label, Some(seed), n, "running_min_average", s.min, tol, s.min <= lower + tol);
    }

    let grid: Vec<f64> = match params.targets {
        0 => Vec::new(),
        1 => vec![0.5 * (lower + upper)],
        m => (0..m).map(|j| lower + (upper - lower) * j as f64 / (m - 1) as f64).collect(),
    };
    let targeted = grid
        .iter()
        .map(|&b| stationary_for_target(set, b))
        .collect::<Result<Vec<_>>>()?;
    let runs = run_all(&targeted, &params.seeds, |st, seed| average_summary(set, st, n, seed, from))?;
    for (i, (label, seed, s)) in runs.iter().enumerate() {
        let b = grid[i / params.seeds.len()];
        let gap = (s.last - b).abs();
        result.check(label, Some(*seed), n, "target_gap", gap, params.mean_tolerance, gap <= params.mean_tolerance);
    }
    let outside = upper + 0.2;
    let rejected = matches!(stationary_for_target(set, outside), Err(Error::TargetOutOfRange { .. }));
    result.check(&format!("target={outside}"), None, n, "out_of_range_rejected", f64::from(u8::from(rejected)), 0.0, rejected);

    Ok(result)
}

/// Heavy tails without a mean: `max_{n <= N} |S_n| / n` over a grid of `N`.
/// Reported, not asserted.
pub fn run_divergence(set: &AmbiguitySet, n_grid: &[u64], seeds: &[u64]) -> Result<ExperimentResult> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    let mut result = ExperimentResult::new("divergence", set.label());
    let choquet = choquet_integral(set, Transform::Abs(1.0))?;
    result.info("-", None, 0, "choquet_abs_mean", choquet);
    let n = n_grid.iter().copied().max().unwrap_or(0);
    let members = (0..set.len())
        .map(|i| Strategy::pure(format!("member-{i}"), set.len(), i))
        .collect::<Vec<_>>();
    let runs = run_all(&members, seeds, |st, seed| {
        let mut checkpoints = Vec::new();
        let mut running: f64 = 0.0;
        simulate(set, st, n as usize, seed, |_| 1.0, |t, _, sum| {
            running = running.max(sum[0].abs() / t as f64);
            if n_grid.contains(&t) {
                checkpoints.push((t, running));
            }
        })?;
        Ok(checkpoints)
    })?;
    for (label, seed, checkpoints) in runs {
        let mut previous = 0.0;
        let mut nondecreasing = true;
        for (t, v) in checkpoints {
            nondecreasing &= v >= previous;
            previous = v;
            result.info(&label, Some(seed), t, "running_max_abs_average", v);
        }
        result.info(&label, Some(seed), n, "nondecreasing_over_grid", f64::from(u8::from(nondecreasing)));
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarcinkiewiczParams {
    pub p: f64,
    pub n: u64,
    pub seeds: Vec<u64>,
    /// Bound on the normalised deviation over the tail.
    pub envelope: f64,
    pub burn_in: f64,
    /// Horizon of the series test that decides the moment condition.
    pub series_horizon: usize,
}

/// Running extremes of `(S_n - n c) / n^{1/p}` over the tail.
fn rate_extremes(set: &AmbiguitySet, st: &Strategy, n: u64, seed: u64, from: u64, c: f64, p: f64) -> Result<(f64, f64)> {
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    simulate(set, st, n as usize, seed, |_| 1.0, |t, _, sum| {
        if t >= from {
            let v = (sum[0] - t as f64 * c) / (t as f64).powf(1.0 / p);
            hi = hi.max(v);
            lo = lo.min(v);
        }
    })?;
    Ok((hi, lo))
}

/// Marcinkiewicz rates: with `C_V(|X|^p)` finite, `(S_n - n Ê̆[X]) / n^{1/p}`
/// stays small under the max-mean strategy. When the moment condition fails
/// the same statistics are reported as evidence only.
pub fn run_marcinkiewicz(set: &AmbiguitySet, params: &MarcinkiewiczParams) -> Result<ExperimentResult> {
    let p = params.p;
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, 2), got {p}")));
    }
    let mut result = ExperimentResult::new("marcinkiewicz", set.label());
    let series = choquet_series_test(set, p, 1.0, params.series_horizon)?;
    let holds = series.series.verdict == SeriesVerdict::Convergent && series.choquet_finite;
    result.info("-", None, 0, "choquet_p_moment", series.choquet);
    result.info("-", None, 0, "moment_condition_holds", f64::from(u8::from(holds)));
    if !holds {
        result.note("moment condition fails; envelope rows are evidence, not assertions");
    }
    let means = breve_expectation(set, MEAN_TOL)?;
    let (upper, lower) = (means.upper_mean, means.lower_mean);
    let n = params.n;
    let from = burn_in_start(n, params.burn_in);
    let tol = params.envelope;
    let band = 4.0 * upper_second_moment(set).sqrt() * (n as f64).powf(0.5 - 1.0 / p) * (n as f64).ln();
    result.info("-", None, n, "clt_band", band);

    let max_strategy = stationary_max(set)?;
    for (label, seed, (hi, lo)) in run_all(&[max_strategy], &params.seeds, |st, seed| {
        rate_extremes(set, st, n, seed, from, upper, p)
    })? {
        let dev = hi.max(-lo);
        if holds {
            result.check(&label, Some(seed), n, "max_abs_normalised_deviation", dev, tol, dev <= tol);
        } else {
            result.info(&label, Some(seed), n, "max_abs_normalised_deviation", dev);
        }
    }

    if set.len() > 1 && holds {
        let e = 2.0 * p / (2.0 - p);
        let growth = BlockGrowth::Polynomial(e);
        let blocks = growth.blocks_to_reach(n).max(2);
        let osc = oscillation_schedule_with(set, blocks, growth)?;
        for (label, seed, (hi, lo)) in run_all(std::slice::from_ref(&osc), &params.seeds, |st, seed| {
            let (hi, _) = rate_extremes(set, st, n, seed, from, upper, p)?;
            let (_, lo) = rate_extremes(set, st, n, seed, from, lower, p)?;
            Ok((hi, lo))
        })? {
            result.check(&label, Some(seed), n, "max_upper_centred_deviation", hi, tol, hi <= tol);
            result.check(&label, Some(seed), n, "min_lower_centred_deviation", lo, tol, lo >= -tol);
        }
    }
    Ok(result)
}
