//! Maximal inequalities and series criteria, checked against exact
//! capacities.
//!
//! Every checker returns a [`BoundReport`] holding the exact (or estimated)
//! left-hand side and the closed-form right-hand side.

use std::f64::consts::E;
use std::fmt;

use crate::distribution::{AmbiguitySet, Event, Interval, Region};
use crate::dp::{dp_value, LatticeModel, Mode, PathFunctional};
use crate::error::{Error, Result};
use crate::expectation::{
    breve_expectation, choquet_integral, event_upper_capacity, tail_capacity, upper_capped_second_moment,
    upper_expectation, upper_mean_excess, TestFunction, Transform,
};
use crate::sampler::mixture_for_mean;

/// Outcome of pitting a left-hand side against a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    /// Raw bound.
    pub rhs: f64,
    /// `min(1, rhs)`, the bound as a capacity.
    pub rhs_capped: f64,
    /// Zero for exact left-hand sides.
    pub ci_half_width: f64,
    pub satisfied: bool,
    pub context: String,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64, ci_half_width: f64, context: impl Into<String>) -> Self {
        Self {
            lhs,
            rhs,
            rhs_capped: rhs.min(1.0),
            ci_half_width,
            satisfied: lhs <= rhs + ci_half_width,
            context: context.into(),
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs={:.6} rhs={:.6} ({})",
            self.context,
            self.lhs,
            self.rhs_capped,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )
    }
}

/// `(e + 1) B^2 / x^2`
pub fn kolmogorov_upper_bound(b2: f64, x: f64) -> f64 {
    (E + 1.0) * b2 / (x * x)
}

/// `exp{x/y - (x/y)(B^2/(xy) + 1) ln(1 + xy/B^2)}`, without the
/// `V(max Z >= y)` term.
pub fn exponential_bound(b2: f64, x: f64, y: f64) -> f64 {
    if b2 <= 0.0 {
        return 0.0;
    }
    let r = x / y;
    let u = x * y / b2;
    (r - r * (1.0 / u + 1.0) * u.ln_1p()).exp()
}

/// `2 x^{-2} sum_k (second_moments[k] - mus[k]^2)`
pub fn kolmogorov_lower_bound(second_moments: &[f64], mus: &[f64], x: f64) -> f64 {
    let total: f64 = second_moments.iter().zip(mus).map(|(s, m)| s - m * m).sum();
    2.0 * total / (x * x)
}

/// The lower-capacity bound for `n = mus.len()` copies of `set`, after
/// checking that every `mu` is the mean of some mixture of members.
pub fn kolmogorov_lower_capacity_bound(set: &AmbiguitySet, mus: &[f64], x: f64) -> Result<f64> {
    for &mu in mus {
        mixture_for_mean(set, &[mu])?;
    }
    let second = upper_expectation(set, &TestFunction::square())?;
    Ok(kolmogorov_lower_bound(&vec![second; mus.len()], mus, x))
}

/// The maximal inequalities that [`check_inequality`] can test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inequality {
    /// `V(max_m S'_m >= x) <= (e+1) B^2/x^2` for increments centred at
    /// their upper mean.
    KolmogorovUpper,
    /// `v(max_m |S_m - m mu| >= x) <= 2x^{-2} n (Ê[X^2] - mu^2)`.
    KolmogorovLower { mu: f64 },
    /// `V(max_m S'_m >= x) <= V(max_k Z_k >= y) + exponential term`.
    Exponential { y: f64 },
}

fn centered(model: &LatticeModel) -> Result<(LatticeModel, f64)> {
    let upper = breve_expectation(model.set(), 1e-12)?.upper_mean;
    let shifted = model.set().shifted(&[-upper])?;
    Ok((LatticeModel::inferred(&shifted)?, upper))
}

/// Exact check of one maximal inequality for `n` i.i.d. steps of `model`.
pub fn check_inequality(model: &LatticeModel, which: Inequality, n: usize, x: f64) -> Result<BoundReport> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("x must be positive, got {x}")));
    }
    let label = model.set().label();
    match which {
        Inequality::KolmogorovUpper => {
            let (z, _) = centered(model)?;
            let b2 = n as f64 * upper_expectation(z.set(), &TestFunction::square())?;
            let lhs = dp_value(&z, &PathFunctional::running_max(n, x), Mode::Upper)?;
            Ok(BoundReport::new(
                lhs,
                kolmogorov_upper_bound(b2, x),
                0.0,
                format!("kolmogorov_upper {label} n={n} x={x}"),
            ))
        }
        Inequality::Exponential { y } => {
            if !(y > 0.0) {
                return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
            }
            let (z, _) = centered(model)?;
            let b2 = n as f64 * upper_expectation(z.set(), &TestFunction::square())?;
            let lhs = dp_value(&z, &PathFunctional::running_max(n, x), Mode::Upper)?;
            // Each step may pick the member most likely to jump; the
            // capacity of a jump somewhere is then 1 - (1 - v)^n.
            let v = event_upper_capacity(z.set(), &Event::at_least(0, y))?;
            let jump = 1.0 - (1.0 - v).powi(n as i32);
            Ok(BoundReport::new(
                lhs,
                jump + exponential_bound(b2, x, y),
                0.0,
                format!("exponential {label} n={n} x={x} y={y}"),
            ))
        }
        Inequality::KolmogorovLower { mu } => {
            let rhs = kolmogorov_lower_capacity_bound(model.set(), &vec![mu; n], x)?;
            let lhs = dp_value(model, &PathFunctional::centered_abs(n, mu, x), Mode::Lower)?;
            Ok(BoundReport::new(
                lhs,
                rhs,
                0.0,
                format!("kolmogorov_lower {label} n={n} x={x} mu={mu}"),
            ))
        }
    }
}

/// Smallest `beta` (to half a lattice quantum) with
/// `V(|S_m| > beta) <= alpha` for `m` steps.
fn levy_beta(model: &LatticeModel, m: usize, alpha: f64) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let exceeds = |beta: f64| -> Result<bool> {
        let f = PathFunctional::terminal_event(m, Region::Outside(Interval::closed(-beta, beta)));
        Ok(dp_value(model, &f, Mode::Upper)? > alpha)
    };
    let reach = (0..model.members())
        .flat_map(|i| model.member_steps(i).iter().map(|s| s.0.unsigned_abs()))
        .max()
        .unwrap_or(0) as f64
        * model.quantum()
        * m as f64;
    let (mut lo, mut hi) = (0.0, reach);
    if !exceeds(lo)? {
        return Ok(0.0);
    }
    while hi - lo > model.quantum() / 2.0 {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Exact check of the Lévy maximal inequality
/// `(1 - alpha) V(max_k (|S_k| - beta_k) > x + eps) <= V(|S_n| > x)`.
///
/// `beta_k` is found by bisection so that `V(|S_n - S_k| > beta_k) <= alpha`,
/// and `eps` is a quarter quantum.
pub fn levy_bound_check(model: &LatticeModel, n: usize, x: f64, alpha: f64) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if n == 0 || !(x > 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and x > 0".into()));
    }
    let eps = model.quantum() / 4.0;
    let beta = (1..=n).map(|k| levy_beta(model, n - k, alpha)).collect::<Result<Vec<_>>>()?;
    let lhs = (1.0 - alpha) * dp_value(model, &PathFunctional::levy(&beta, x + eps), Mode::Upper)?;
    let rhs = dp_value(
        model,
        &PathFunctional::terminal_event(n, Region::Outside(Interval::closed(-x, x))),
        Mode::Upper,
    )?;
    Ok(BoundReport::new(
        lhs,
        rhs,
        0.0,
        format!("levy {} n={n} x={x} alpha={alpha}", model.set().label()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Tail-ratio verdict for a series of nonnegative terms `a_1, a_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub horizon: usize,
    pub partial_sum: f64,
    pub partial_sum_tenth: f64,
    /// Fitted decay exponent of the terms between `K/10` and `K`.
    pub exponent: Option<f64>,
    /// `sum_{K/10 < i <= K} a_i` against the integral of the fitted power law.
    pub tail_sum: f64,
    pub tail_integral: f64,
    pub verdict: SeriesVerdict,
}

/// Exponent above which a fitted power law counts as summable.
pub const SUMMABLE_EXPONENT: f64 = 1.01;
/// Largest relative gap between the tail sum and the fitted integral.
pub const TAIL_MATCH_TOL: f64 = 0.1;

/// Classifies `sum a_i` from its terms up to `horizon` (at least 10).
///
/// The terms on `(K/10, K]` are fitted by `C t^{-beta}` through the two
/// endpoints; if the tail sum matches the fitted integral within 10% the
/// series converges iff `beta > 1.01`. Terms that vanish at `K` make the
/// series convergent.
pub fn series_verdict<F: Fn(usize) -> f64>(term: F, horizon: usize) -> SeriesReport {
    let k = horizon.max(10);
    let k10 = k / 10;
    let terms: Vec<f64> = (1..=k).map(|i| term(i).abs()).collect();
    let partial_sum_tenth: f64 = terms[..k10].iter().sum();
    let tail_sum: f64 = terms[k10..].iter().sum();
    let partial_sum = partial_sum_tenth + tail_sum;
    let (a_lo, a_hi) = (terms[k10 - 1], terms[k - 1]);
    let mut report = SeriesReport {
        horizon: k,
        partial_sum,
        partial_sum_tenth,
        exponent: None,
        tail_sum,
        tail_integral: 0.0,
        verdict: SeriesVerdict::Inconclusive,
    };
    if a_hi == 0.0 {
        report.verdict = SeriesVerdict::Convergent;
        return report;
    }
    let (kf, k10f) = (k as f64, k10 as f64);
    let beta = (a_lo / a_hi).ln() / (kf / k10f).ln();
    let c = a_hi * kf.powf(beta);
    let integral = if (beta - 1.0).abs() < 1e-12 {
        c * (kf / k10f).ln()
    } else {
        c * (kf.powf(1.0 - beta) - k10f.powf(1.0 - beta)) / (1.0 - beta)
    };
    report.exponent = Some(beta);
    report.tail_integral = integral;
    if beta.is_finite() && (tail_sum - integral).abs() <= TAIL_MATCH_TOL * integral {
        report.verdict = if beta > SUMMABLE_EXPONENT {
            SeriesVerdict::Convergent
        } else {
            SeriesVerdict::Divergent
        };
    }
    report
}

/// Joint report on `C_V(|X|^p)` and `sum_i V(|X| >= M i^{1/p})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoquetSeriesReport {
    pub p: f64,
    pub m: f64,
    pub series: SeriesReport,
    pub choquet: f64,
    pub choquet_finite: bool,
    /// Both criteria reach the same conclusion.
    pub agree: bool,
    /// `(c, c^{p-1} Ê̆[(|X|-c)^+], c^{p-2} Ê[X^2 ∧ c^2])` on `c = 2, 4, 8, ...`.
    pub asymptotics: Vec<(f64, f64, f64)>,
}

/// Number of doubling levels in [`ChoquetSeriesReport::asymptotics`].
pub const ASYMPTOTIC_LEVELS: u32 = 30;

/// Compares summability of the tail-capacity series with finiteness of the
/// Choquet moment of order `p`.
pub fn choquet_series_test(set: &AmbiguitySet, p: f64, m: f64, horizon: usize) -> Result<ChoquetSeriesReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p must lie in [1, 2), got {p}")));
    }
    if !(m > 0.0) || horizon < 1000 {
        return Err(Error::InvalidArgument("need M > 0 and a horizon of at least 1000".into()));
    }
    let series = series_verdict(
        |i| tail_capacity(set, &Transform::Abs(1.0), m * (i as f64).powf(1.0 / p)),
        horizon,
    );
    let choquet = choquet_integral(set, Transform::Abs(p))?;
    let choquet_finite = choquet.is_finite();
    let agree = match series.verdict {
        SeriesVerdict::Convergent => choquet_finite,
        SeriesVerdict::Divergent => !choquet_finite,
        SeriesVerdict::Inconclusive => false,
    };
    let asymptotics = (1..=ASYMPTOTIC_LEVELS)
        .map(|j| {
            let c = 2f64.powi(j as i32);
            (
                c,
                c.powf(p - 1.0) * upper_mean_excess(set, c),
                c.powf(p - 2.0) * upper_capped_second_moment(set, c),
            )
        })
        .collect();
    Ok(ChoquetSeriesReport {
        p,
        m,
        series,
        choquet,
        choquet_finite,
        agree,
        asymptotics,
    })
}

/// Threshold below which a capacity tail sum counts as finite.
pub const BOREL_CANTELLI_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BorelCantelliReport {
    /// Sum of the second half of the capacities.
    pub tail_sum: f64,
    pub summable: bool,
    /// Whether an assertion was made (only for summable series).
    pub asserted: bool,
    pub io_frequency: f64,
    pub satisfied: bool,
}

/// Direct half of the Borel-Cantelli lemma: with summable capacities the
/// observed frequency of paths where the events recur must be zero. For
/// non-summable series nothing is asserted.
pub fn borel_cantelli_diagnostic(capacities: &[f64], io_frequency: f64) -> BorelCantelliReport {
    let tail_sum: f64 = capacities[capacities.len() / 2..].iter().sum();
    let summable = !capacities.is_empty() && tail_sum < BOREL_CANTELLI_TAIL;
    BorelCantelliReport {
        tail_sum,
        summable,
        asserted: summable,
        io_frequency,
        satisfied: !summable || io_frequency == 0.0,
    }
}
