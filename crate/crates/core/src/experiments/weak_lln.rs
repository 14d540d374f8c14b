//! Weak law of large numbers: capacities of `S_n / n` straying from the mean
//! set, exactly by dynamic programming in one dimension and by simulation
//! in higher dimensions.

use rayon::prelude::*;

use super::result::ExperimentResult;
use crate::distribution::{AmbiguitySet, Interval, Region};
use crate::dp::{dp_value, LatticeModel, Mode, PathFunctional};
use crate::error::{Error, Result};
use crate::expectation::breve_expectation;
use crate::geometry::build_mean_set;
use crate::rng::derive_seed;
use crate::sampler::{simulate, Strategy};

/// Allowed increase of the exact capacity between consecutive grid points.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLlnParams {
    pub n_grid: Vec<u64>,
    pub epsilon: f64,
    /// Bound on `V(dist(S_n/n, M) >= eps)` at the largest `n`.
    pub capacity_threshold: f64,
    /// Lower bound on `V(|S_n/n - b| < eps)` for the interior point `b`.
    pub interior_threshold: f64,
    /// Allowed gap between `Ê[phi(S_n/n)]` and `sup_M phi` at the largest `n`.
    pub bank_tolerance: f64,
}

type Phi = fn(f64, f64, f64) -> f64;

/// Test functions `phi(x; lower, upper)` with their supremum over the mean
/// interval.
fn test_bank() -> Vec<(&'static str, Phi, Phi)> {
    vec![
        (
            "min1_dist_to_M",
            |x, lo, hi| (lo - x).max(x - hi).clamp(0.0, 1.0),
            |_, _, _| 0.0,
        ),
        ("clipped_identity", |x, _, _| x.clamp(-1.0, 1.0), |_, _, hi| hi.clamp(-1.0, 1.0)),
        (
            "clipped_square",
            |x, _, _| (x * x).min(1.0),
            |_, lo, hi| (lo * lo).max(hi * hi).min(1.0),
        ),
    ]
}

/// Exact capacities for a one-dimensional lattice model.
pub fn run_weak_lln(model: &LatticeModel, params: &WeakLlnParams) -> Result<ExperimentResult> {
    let set = model.set();
    let means = breve_expectation(set, 1e-12)?;
    let (lo, hi) = (means.lower_mean, means.upper_mean);
    let eps = params.epsilon;
    let mut grid = params.n_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let largest = *grid.last().ok_or_else(|| Error::InvalidArgument("empty n grid".into()))?;
    let mut result = ExperimentResult::new("weak_lln", set.label());
    result.note(format!("mean interval [{lo}, {hi}], epsilon {eps}"));

    let evaluations: Vec<Result<(f64, f64)>> = grid
        .par_iter()
        .map(|&n| {
            let nf = n as f64;
            let outside = Region::Outside(Interval::open(nf * (lo - eps), nf * (hi + eps)));
            let stray = dp_value(model, &PathFunctional::terminal_event(n as usize, outside), Mode::Upper)?;
            let b = 0.5 * (lo + hi);
            let near = Region::Inside(Interval::open(nf * (b - eps), nf * (b + eps)));
            let close = dp_value(model, &PathFunctional::terminal_event(n as usize, near), Mode::Upper)?;
            Ok((stray, close))
        })
        .collect();
    let mut previous = f64::INFINITY;
    for (&n, value) in grid.iter().zip(evaluations) {
        let (stray, close) = value?;
        let monotone = stray <= previous + MONOTONE_TOL;
        result.check("exact", None, n, "capacity_dist_at_least_eps", stray, MONOTONE_TOL, monotone);
        previous = stray;
        if n == largest {
            result.check(
                "exact",
                None,
                n,
                "capacity_dist_at_least_eps_final",
                stray,
                params.capacity_threshold,
                stray <= params.capacity_threshold,
            );
            result.check(
                "exact",
                None,
                n,
                "capacity_near_interior_point",
                close,
                params.interior_threshold,
                close >= params.interior_threshold,
            );
        } else {
            result.info("exact", None, n, "capacity_near_interior_point", close);
        }
    }

    for (name, phi, sup) in test_bank() {
        let target = sup(0.0, lo, hi);
        for &n in &grid {
            let f = PathFunctional::terminal_average(n as usize, move |x| phi(x, lo, hi));
            let gap = (dp_value(model, &f, Mode::Upper)? - target).abs();
            let statistic = format!("bank_gap_{name}");
            if n == largest {
                result.check("exact", None, n, &statistic, gap, params.bank_tolerance, gap <= params.bank_tolerance);
            } else {
                result.info("exact", None, n, &statistic, gap);
            }
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLlnMcParams {
    pub n_grid: Vec<u64>,
    pub epsilon: f64,
    pub capacity_threshold: f64,
    pub replicates: usize,
    pub seed: u64,
    pub delta: f64,
}

/// Simulated `max over strategies` frequencies of `dist(S_n/n, M) >= eps`
/// for vector models, with 95% confidence half-widths.
pub fn run_weak_lln_mc(set: &AmbiguitySet, params: &WeakLlnMcParams) -> Result<ExperimentResult> {
    let mean_set = build_mean_set(set, params.delta)?;
    let mut strategies: Vec<Strategy> = (0..set.len())
        .map(|i| Strategy::pure(format!("member-{i}"), set.len(), i))
        .collect();
    strategies.push(Strategy::stationary("uniform", vec![1.0 / set.len() as f64; set.len()]));
    let mut grid = params.n_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let largest = *grid.last().ok_or_else(|| Error::InvalidArgument("empty n grid".into()))?;
    let mut result = ExperimentResult::new("weak_lln", set.label());
    result.note("Monte Carlo mode: frequencies are maxima over the listed strategies");
    for &n in &grid {
        let mut worst = (0.0, 0.0, String::new());
        for st in &strategies {
            let hits: usize = (0..params.replicates)
                .into_par_iter()
                .map(|r| -> Result<usize> {
                    let mut last = Vec::new();
                    simulate(set, st, n as usize, derive_seed(params.seed, r as u64), |_| 1.0, |_, _, s| {
                        if last.is_empty() {
                            last = s.to_vec();
                        } else {
                            last.copy_from_slice(s);
                        }
                    })?;
                    let avg: Vec<f64> = last.iter().map(|v| v / n as f64).collect();
                    Ok(usize::from(mean_set.distance(&avg) >= params.epsilon))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            let freq = hits as f64 / params.replicates as f64;
            let half = 1.96 * (freq * (1.0 - freq) / params.replicates as f64).sqrt();
            result.info(&st.label, Some(params.seed), n, "frequency_dist_at_least_eps", freq);
            if freq > worst.0 || worst.2.is_empty() {
                worst = (freq, half, st.label.clone());
            }
        }
        if n == largest {
            let (freq, half, label) = worst;
            result.check(
                &label,
                Some(params.seed),
                n,
                "max_frequency_dist_at_least_eps",
                freq,
                params.capacity_threshold,
                freq <= params.capacity_threshold + half,
            );
        }
    }
    Ok(result)
}
