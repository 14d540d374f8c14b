//! Cluster sets of `S_n / n` for vector models.

use rayon::prelude::*;

use super::result::ExperimentResult;
use crate::distribution::AmbiguitySet;
use crate::error::Result;
use crate::expectation::upper_second_moment;
use crate::geometry::{build_mean_set, MeanSet};
use crate::sampler::{simulate, target_chasing_schedule, Strategy, StrategyKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterParams {
    pub targets: usize,
    pub n: u64,
    pub seeds: Vec<u64>,
    pub delta: f64,
    pub outer_tolerance: f64,
    pub hausdorff_tolerance: f64,
    pub burn_in: f64,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `max_{a in from} min_{b in to} |a - b|`
pub fn directed_hausdorff(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.iter()
        .map(|a| to.iter().map(|b| euclid(a, b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Largest excess of `dist(S_n/n, M)` over the allowed slack along one path,
/// and the averages at `visits`.
///
/// The distance is 1-Lipschitz, so after an evaluation with room `r` below
/// the smallest slack it is re-evaluated only once the averages have moved
/// by `r` in total. The reported excess and distance are maxima over the
/// evaluated steps; every tail step is covered by the verdict.
#[allow(clippy::too_many_arguments)]
fn containment(
    set: &AmbiguitySet,
    mean_set: &MeanSet,
    st: &Strategy,
    n: u64,
    seed: u64,
    from: u64,
    outer: f64,
    visits: &[u64],
) -> Result<(f64, f64, Vec<Vec<f64>>)> {
    let second = upper_second_moment(set);
    let floor = outer + 4.0 * (second / n as f64).sqrt();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_distance: f64 = 0.0;
    let mut room = 0.0;
    let mut points = Vec::new();
    let mut avg = vec![0.0; set.dim()];
    let mut moved = vec![0.0; set.dim()];
    simulate(set, st, n as usize, seed, |_| 1.0, |t, _, s| {
        let tf = t as f64;
        for ((a, d), v) in avg.iter_mut().zip(moved.iter_mut()).zip(s) {
            let next = v / tf;
            *d = next - *a;
            *a = next;
        }
        if t >= from {
            room -= moved.iter().map(|d| d * d).sum::<f64>().sqrt();
            if room <= 0.0 || t == from {
                let d = mean_set.distance(&avg);
                let slack = outer + 4.0 * (second / tf).sqrt();
                worst_excess = worst_excess.max(d - slack);
                worst_distance = worst_distance.max(d);
                room = floor - d;
            }
        }
        if visits.binary_search(&t).is_ok() {
            points.push(avg.clone());
        }
    })?;
    Ok((worst_excess, worst_distance, points))
}

/// Chases a grid of targets in the mean set and compares the visited
/// averages with the grid; checks containment in the mean set under every
/// strategy tried.
pub fn run_cluster_set(set: &AmbiguitySet, params: &ClusterParams) -> Result<ExperimentResult> {
    let mean_set = build_mean_set(set, params.delta)?;
    let n = params.n;
    let m = params.targets.max(1);
    let chase = target_chasing_schedule(set, &mean_set, m, m, n)?;
    let StrategyKind::TargetChasing { targets, blocks } = &chase.kind else {
        unreachable!("chasing schedule")
    };
    let final_epoch = blocks.last().map(|b| b.epoch).unwrap_or(0);
    let visits: Vec<u64> = blocks.iter().filter(|b| b.epoch == final_epoch).map(|b| b.end).collect();
    let mut strategies = vec![chase.clone()];
    strategies.extend((0..set.len()).map(|i| Strategy::pure(format!("member-{i}"), set.len(), i)));
    strategies.push(Strategy::stationary("uniform", vec![1.0 / set.len() as f64; set.len()]));

    let from = ((n as f64 * params.burn_in).ceil() as u64).max(1);
    let mut result = ExperimentResult::new("cluster_set", set.label());
    result.note(format!("{} targets, {} directions, containment over n >= {from}", targets.len(), mean_set.net().len()));
    let jobs: Vec<(&Strategy, u64)> = strategies
        .iter()
        .flat_map(|s| params.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let runs = jobs
        .into_par_iter()
        .map(|(st, seed)| {
            let v = if st.label == chase.label { visits.as_slice() } else { &[] };
            containment(set, &mean_set, st, n, seed, from, params.outer_tolerance, v).map(|r| (st.label.clone(), seed, r))
        })
        .collect::<Result<Vec<_>>>()?;
    for (label, seed, (excess, distance, points)) in runs {
        result.info(&label, Some(seed), n, "max_tail_distance_to_M", distance);
        result.check(&label, Some(seed), n, "containment_excess", excess, 0.0, excess <= 0.0);
        if label == chase.label {
            let inner = directed_hausdorff(targets, &points);
            let outer = directed_hausdorff(&points, targets);
            result.info(&label, Some(seed), n, "hausdorff_targets_to_visits", inner);
            let two_sided = inner.max(outer);
            let tol = params.hausdorff_tolerance;
            result.check(&label, Some(seed), n, "hausdorff_two_sided", two_sided, tol, two_sided <= tol);
        }
    }
    Ok(result)
}
