//! Adversarial sampling of sequences that are i.i.d. under the sub-linear
//! expectation.
//!
//! A [`Strategy`] picks, for each step, a mixture over the members of the
//! ambiguity set. The induced law of the path is a product measure over
//! steps (or blocks of steps), which is dominated by the upper expectation.
//!
//! Each step draws from a counter-based stream keyed by `(seed, step)`:
//! lane 0 selects the member, lane 1 is the inverse-CDF uniform, lane 2 the
//! sign of a Pareto draw.

use nalgebra::{DMatrix, DVector};

use crate::distribution::{AmbiguitySet, Distribution, TwoSidedPareto};
use crate::error::{Error, Result};
use crate::expectation::breve_expectation;
use crate::geometry::MeanSet;
use crate::rng::{lane_uniform, step_seed};

/// Tolerance on mixture weights summing to one.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Largest residual accepted when realising a target mean.
pub const MIXTURE_RESIDUAL_TOL: f64 = 1e-9;

/// Growth rule for block ends `n_1 < n_2 < ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockGrowth {
    /// `n_k = 2^k`
    Doubling,
    /// `n_k = 2^{k(k+1)/2}`, so that `n_{k-1}/n_k = 2^{-k} -> 0`
    Triangular,
    /// `n_k = ceil(k^e)`
    Polynomial(f64),
}

impl BlockGrowth {
    /// Block end of epoch `k >= 1`, saturating at `u64::MAX`.
    pub fn end(&self, k: u32) -> u64 {
        match *self {
            BlockGrowth::Doubling => 1u64.checked_shl(k).unwrap_or(u64::MAX),
            BlockGrowth::Triangular => {
                let e = (k as u64) * (k as u64 + 1) / 2;
                if e >= 64 {
                    u64::MAX
                } else {
                    1u64 << e
                }
            }
            BlockGrowth::Polynomial(e) => {
                let v = (k as f64).powf(e).ceil();
                if v >= u64::MAX as f64 {
                    u64::MAX
                } else {
                    v as u64
                }
            }
        }
    }

    /// The first `count` block ends, forced strictly increasing.
    pub fn ends(&self, count: usize) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::with_capacity(count);
        for k in 1..=count {
            let e = self.end(k as u32);
            let prev = out.last().copied().unwrap_or(0);
            out.push(e.max(prev.saturating_add(1)));
        }
        out
    }

    /// Smallest number of blocks whose last end reaches `n`.
    pub fn blocks_to_reach(&self, n: u64) -> usize {
        let mut k = 1;
        while *self.ends(k).last().expect("nonempty") < n {
            k += 1;
        }
        k
    }
}

/// A run of steps `(previous end, end]` sharing one mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub end: u64,
    pub weights: Vec<f64>,
}

/// A block aimed at one target of a chasing schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaseBlock {
    pub end: u64,
    pub epoch: usize,
    pub target: usize,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    Stationary { weights: Vec<f64> },
    BlockSchedule { blocks: Vec<Block> },
    TargetChasing { targets: Vec<Vec<f64>>, blocks: Vec<ChaseBlock> },
}

/// Rule choosing the member mixture at every step. Past the last block the
/// last block's mixture stays in force.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub label: String,
    pub kind: StrategyKind,
}

fn check_weights(weights: &[f64], members: usize) -> Result<()> {
    if weights.len() != members {
        return Err(Error::InvalidArgument(format!(
            "{} mixture weights for {members} members",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument(format!("negative mixture weight in {weights:?}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
    }
    Ok(())
}

fn check_ends<I: Iterator<Item = u64>>(ends: I) -> Result<()> {
    let mut prev = 0;
    for e in ends {
        if e <= prev {
            return Err(Error::InvalidArgument("block ends must be strictly increasing".into()));
        }
        prev = e;
    }
    Ok(())
}

impl Strategy {
    pub fn stationary(label: impl Into<String>, weights: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            kind: StrategyKind::Stationary { weights },
        }
    }

    /// Always the member `index` of a set with `members` members.
    pub fn pure(label: impl Into<String>, members: usize, index: usize) -> Self {
        let mut w = vec![0.0; members];
        w[index] = 1.0;
        Self::stationary(label, w)
    }

    pub fn block_schedule(label: impl Into<String>, blocks: Vec<Block>) -> Self {
        Self {
            label: label.into(),
            kind: StrategyKind::BlockSchedule { blocks },
        }
    }

    /// Checks weights and block ends against a set with `members` members.
    pub fn validate(&self, members: usize) -> Result<()> {
        match &self.kind {
            StrategyKind::Stationary { weights } => check_weights(weights, members),
            StrategyKind::BlockSchedule { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidArgument("empty block schedule".into()));
                }
                check_ends(blocks.iter().map(|b| b.end))?;
                blocks.iter().try_for_each(|b| check_weights(&b.weights, members))
            }
            StrategyKind::TargetChasing { blocks, targets } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidArgument("empty chasing schedule".into()));
                }
                check_ends(blocks.iter().map(|b| b.end))?;
                if blocks.iter().any(|b| b.target >= targets.len()) {
                    return Err(Error::InvalidArgument("block refers to a missing target".into()));
                }
                blocks.iter().try_for_each(|b| check_weights(&b.weights, members))
            }
        }
    }

    /// Ends of the schedule's blocks (empty for stationary strategies).
    pub fn block_ends(&self) -> Vec<u64> {
        match &self.kind {
            StrategyKind::Stationary { .. } => Vec::new(),
            StrategyKind::BlockSchedule { blocks } => blocks.iter().map(|b| b.end).collect(),
            StrategyKind::TargetChasing { blocks, .. } => blocks.iter().map(|b| b.end).collect(),
        }
    }

    fn segments(&self) -> Vec<(u64, &[f64])> {
        match &self.kind {
            StrategyKind::Stationary { weights } => vec![(u64::MAX, weights.as_slice())],
            StrategyKind::BlockSchedule { blocks } => {
                blocks.iter().map(|b| (b.end, b.weights.as_slice())).collect()
            }
            StrategyKind::TargetChasing { blocks, .. } => {
                blocks.iter().map(|b| (b.end, b.weights.as_slice())).collect()
            }
        }
    }

    /// Mixture in force at step `t >= 1`.
    pub fn weights_at(&self, t: u64) -> &[f64] {
        let segments = self.segments();
        segments
            .iter()
            .find(|(end, _)| t <= *end)
            .or(segments.last())
            .map(|(_, w)| *w)
            .expect("strategy has at least one segment")
    }
}

/// Member means where they exist; error otherwise.
fn member_means(set: &AmbiguitySet) -> Result<Vec<Vec<f64>>> {
    set.members()
        .iter()
        .map(|m| {
            m.mean()
                .ok_or_else(|| Error::NotConvergent(format!("member {m} has no mean")))
        })
        .collect()
}

fn extreme_members(set: &AmbiguitySet) -> Result<(usize, usize)> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    let means: Vec<f64> = member_means(set)?.into_iter().map(|m| m[0]).collect();
    let mut hi = 0;
    let mut lo = 0;
    for (i, &m) in means.iter().enumerate() {
        if m > means[hi] {
            hi = i;
        }
        if m < means[lo] {
            lo = i;
        }
    }
    Ok((hi, lo))
}

/// Always the member with the largest mean.
pub fn stationary_max(set: &AmbiguitySet) -> Result<Strategy> {
    let (hi, _) = extreme_members(set)?;
    Ok(Strategy::pure("max-mean", set.len(), hi))
}

/// Always the member with the smallest mean.
pub fn stationary_min(set: &AmbiguitySet) -> Result<Strategy> {
    let (_, lo) = extreme_members(set)?;
    Ok(Strategy::pure("min-mean", set.len(), lo))
}

/// Stationary mixture of the extreme-mean members whose mean is `b`.
pub fn stationary_for_target(set: &AmbiguitySet, b: f64) -> Result<Strategy> {
    let (hi, lo) = extreme_members(set)?;
    let report = breve_expectation(set, 1e-12)?;
    let (lower, upper) = (report.lower_mean, report.upper_mean);
    let slack = 1e-12 * (1.0 + upper.abs().max(lower.abs()));
    if !(b >= lower - slack && b <= upper + slack) {
        return Err(Error::TargetOutOfRange {
            target: b,
            lower,
            upper,
        });
    }
    let alpha = if upper - lower <= slack {
        1.0
    } else {
        ((b - lower) / (upper - lower)).clamp(0.0, 1.0)
    };
    let mut weights = vec![0.0; set.len()];
    weights[hi] += alpha;
    weights[lo] += 1.0 - alpha;
    Ok(Strategy::stationary(format!("target={b}"), weights))
}

/// Alternates pure max-mean and pure min-mean blocks with ends `2^k`,
/// `k = 1..=epochs`, starting with the max-mean member.
pub fn oscillation_schedule(set: &AmbiguitySet, epochs: usize) -> Result<Strategy> {
    oscillation_schedule_with(set, epochs, BlockGrowth::Doubling)
}

/// [`oscillation_schedule`] with another block growth rule.
pub fn oscillation_schedule_with(set: &AmbiguitySet, epochs: usize, growth: BlockGrowth) -> Result<Strategy> {
    if epochs < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 epochs, got {epochs}")));
    }
    let (hi, lo) = extreme_members(set)?;
    let members = set.len();
    let blocks = growth
        .ends(epochs)
        .into_iter()
        .enumerate()
        .map(|(k, end)| {
            let mut weights = vec![0.0; members];
            weights[if k % 2 == 0 { hi } else { lo }] = 1.0;
            Block { end, weights }
        })
        .collect();
    Ok(Strategy::block_schedule(format!("oscillation-{growth:?}"), blocks))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Mixture weights over members whose mean vector is `target`.
///
/// Searches subsets of at most `d + 1` members, smallest first, solving the
/// least-squares system with the simplex row appended and accepting the
/// first nonnegative solution with residual below [`MIXTURE_RESIDUAL_TOL`].
pub fn mixture_for_mean(set: &AmbiguitySet, target: &[f64]) -> Result<Vec<f64>> {
    let dim = set.dim();
    if target.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: target.len(),
        });
    }
    let means: Vec<Option<Vec<f64>>> = set.member_means();
    let usable: Vec<usize> = (0..means.len()).filter(|&i| means[i].is_some()).collect();
    for size in 1..=(dim + 1).min(usable.len()) {
        for subset in subsets(usable.len(), size) {
            let idx: Vec<usize> = subset.iter().map(|&s| usable[s]).collect();
            let a = DMatrix::from_fn(dim + 1, size, |r, c| {
                if r < dim {
                    means[idx[c]].as_ref().expect("usable")[r]
                } else {
                    1.0
                }
            });
            let rhs = DVector::from_fn(dim + 1, |r, _| if r < dim { target[r] } else { 1.0 });
            let Ok(w) = a.clone().svd(true, true).solve(&rhs, 1e-14) else {
                continue;
            };
            if w.iter().any(|v| *v < -1e-12) {
                continue;
            }
            let residual = (&a * &w - &rhs).norm();
            if residual > MIXTURE_RESIDUAL_TOL {
                continue;
            }
            let total: f64 = w.iter().map(|v| v.max(0.0)).sum();
            let mut weights = vec![0.0; set.len()];
            for (c, &i) in idx.iter().enumerate() {
                weights[i] = w[c].max(0.0) / total;
            }
            return Ok(weights);
        }
    }
    Err(Error::MuNotAttainable { mu: target.to_vec() })
}

/// Target-chasing schedule over `m` grid targets of the mean set.
///
/// Epoch `k = 1..=epochs` visits targets `0..min(k, m)`, forwards on odd
/// epochs and backwards on even ones, one block per target, each block
/// using a mixture whose mean is the target. All epochs but the last form a
/// warm-up whose block ends grow geometrically up to `W = max(#blocks,
/// round(horizon^{1/3}))`; the blocks of the last epoch grow geometrically
/// from `W` to `horizon`, so that each final block dwarfs the path before it.
pub fn target_chasing_schedule(
    set: &AmbiguitySet,
    mean_set: &MeanSet,
    m: usize,
    epochs: usize,
    horizon: u64,
) -> Result<Strategy> {
    let targets = mean_set.grid_points(m)?;
    target_chasing_for(set, mean_set, targets, epochs, horizon)
}

/// [`target_chasing_schedule`] for explicitly given targets.
pub fn target_chasing_for(
    set: &AmbiguitySet,
    mean_set: &MeanSet,
    targets: Vec<Vec<f64>>,
    epochs: usize,
    horizon: u64,
) -> Result<Strategy> {
    if targets.is_empty() || epochs == 0 {
        return Err(Error::InvalidArgument("need at least one target and one epoch".into()));
    }
    let tol = mean_set.default_tolerance();
    for t in &targets {
        let distance = mean_set.distance(t);
        if distance > tol {
            return Err(Error::TargetOutsideM {
                target: t.clone(),
                distance,
            });
        }
    }
    let weights = targets
        .iter()
        .map(|t| mixture_for_mean(set, t))
        .collect::<Result<Vec<_>>>()?;
    let m = targets.len();
    let mut visits = Vec::new();
    for k in 1..=epochs {
        let mut order: Vec<usize> = (0..k.min(m)).collect();
        if k % 2 == 0 {
            order.reverse();
        }
        visits.extend(order.into_iter().map(|j| (k, j)));
    }
    let last = epochs.min(m);
    let warm = visits.len() - last;
    let anchor = if warm == 0 {
        0
    } else {
        (warm as u64).max((horizon as f64).cbrt().round() as u64)
    };
    if horizon < anchor + last as u64 {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} too short for {} blocks",
            visits.len()
        )));
    }
    let mut ends: Vec<u64> = Vec::with_capacity(visits.len());
    let mut prev = 0u64;
    for b in 1..=warm {
        let e = ((anchor as f64).powf(b as f64 / warm as f64).round() as u64).max(prev + 1);
        ends.push(e);
        prev = e;
    }
    let base = anchor.max(1) as f64;
    for j in 1..=last {
        let e = if j == last {
            horizon
        } else {
            (base * (horizon as f64 / base).powf(j as f64 / last as f64)).round() as u64
        };
        let e = e.max(prev + 1);
        ends.push(e);
        prev = e;
    }
    let blocks = visits
        .into_iter()
        .zip(ends)
        .map(|((epoch, target), end)| ChaseBlock {
            end,
            epoch,
            target,
            weights: weights[target].clone(),
        })
        .collect();
    Ok(Strategy {
        label: format!("chase-m{m}-k{epochs}"),
        kind: StrategyKind::TargetChasing { targets, blocks },
    })
}

/// A simulated trajectory. Vectors are stored flat, step-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub n: usize,
    pub dim: usize,
    pub increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub seed: u64,
    pub strategy_label: String,
}

impl Path {
    /// Increment `X_m`, `1 <= m <= n`.
    pub fn increment(&self, m: usize) -> &[f64] {
        &self.increments[(m - 1) * self.dim..m * self.dim]
    }

    /// Partial sum `S_m`, `1 <= m <= n`.
    pub fn partial_sum(&self, m: usize) -> &[f64] {
        &self.partial_sums[(m - 1) * self.dim..m * self.dim]
    }

    /// `S_m / m`.
    pub fn average(&self, m: usize) -> Vec<f64> {
        self.partial_sum(m).iter().map(|s| s / m as f64).collect()
    }

    /// `S_m` of a one-dimensional path.
    pub fn sum_1d(&self, m: usize) -> f64 {
        self.partial_sums[m - 1]
    }
}

enum Prepared {
    Discrete { cumulative: Vec<f64>, values: Vec<f64>, dim: usize },
    Pareto(TwoSidedPareto),
}

impl Prepared {
    fn new(member: &Distribution) -> Self {
        match member {
            Distribution::FiniteDiscrete(d) => {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = d
                    .atoms()
                    .iter()
                    .map(|a| {
                        acc += a.weight;
                        acc
                    })
                    .collect();
                *cumulative.last_mut().expect("nonempty") = f64::INFINITY;
                let values = d.atoms().iter().flat_map(|a| a.value.iter().copied()).collect();
                Prepared::Discrete {
                    cumulative,
                    values,
                    dim: d.dim(),
                }
            }
            Distribution::TwoSidedPareto(p) => Prepared::Pareto(*p),
        }
    }

    fn draw(&self, u: f64, u_sign: f64, out: &mut [f64]) {
        match self {
            Prepared::Discrete {
                cumulative,
                values,
                dim,
            } => {
                let i = cumulative.partition_point(|c| *c < u);
                out.copy_from_slice(&values[i * dim..(i + 1) * dim]);
            }
            Prepared::Pareto(p) => {
                let magnitude = p.scale * u.powf(-1.0 / p.alpha);
                out[0] = if u_sign <= p.right_mass { magnitude } else { -magnitude };
            }
        }
    }
}

fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let last = weights.iter().rposition(|w| *w > 0.0).unwrap_or(0);
    for (i, w) in weights.iter().enumerate().take(last) {
        acc += w;
        if u <= acc && *w > 0.0 {
            return i;
        }
    }
    last
}

/// Simulates `n` steps of the strategy.
pub fn sample_path(set: &AmbiguitySet, strategy: &Strategy, n: usize, seed: u64) -> Result<Path> {
    sample_path_scaled(set, strategy, n, seed, |_| 1.0)
}

/// Like [`sample_path`], with step `t` drawn from the set scaled by `scale(t)`.
pub fn sample_path_scaled<F: Fn(u64) -> f64>(
    set: &AmbiguitySet,
    strategy: &Strategy,
    n: usize,
    seed: u64,
    scale: F,
) -> Result<Path> {
    let dim = set.dim();
    let mut increments = Vec::with_capacity(n * dim);
    let mut partial_sums = Vec::with_capacity(n * dim);
    simulate(set, strategy, n, seed, scale, |_, x, s| {
        increments.extend_from_slice(x);
        partial_sums.extend_from_slice(s);
    })?;
    Ok(Path {
        n,
        dim,
        increments,
        partial_sums,
        seed,
        strategy_label: strategy.label.clone(),
    })
}

/// Streams the steps of [`sample_path_scaled`] to `visit(t, X_t, S_t)`
/// without storing the path. Draws are identical to the stored version.
pub fn simulate<F, G>(
    set: &AmbiguitySet,
    strategy: &Strategy,
    n: usize,
    seed: u64,
    scale: F,
    mut visit: G,
) -> Result<()>
where
    F: Fn(u64) -> f64,
    G: FnMut(u64, &[f64], &[f64]),
{
    if n == 0 {
        return Err(Error::InvalidArgument("a path needs at least one step".into()));
    }
    strategy.validate(set.len())?;
    let dim = set.dim();
    let prepared: Vec<Prepared> = set.members().iter().map(Prepared::new).collect();
    let segments = strategy.segments();
    let mut seg = 0;
    let mut x = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    for t in 1..=n as u64 {
        while seg + 1 < segments.len() && t > segments[seg].0 {
            seg += 1;
        }
        let key = step_seed(seed, t);
        let member = pick(segments[seg].1, lane_uniform(key, 0));
        prepared[member].draw(lane_uniform(key, 1), lane_uniform(key, 2), &mut x);
        let a = scale(t);
        for (j, v) in x.iter_mut().enumerate() {
            *v *= a;
            sum[j] += *v;
        }
        visit(t, &x, &sum);
    }
    Ok(())
}
