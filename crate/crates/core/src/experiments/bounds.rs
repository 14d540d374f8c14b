//! Grids of exact maximal-inequality checks and the Choquet/series
//! comparison, as experiments.

use rayon::prelude::*;

use super::result::ExperimentResult;
use crate::distribution::AmbiguitySet;
use crate::dp::LatticeModel;
use crate::error::Result;
use crate::expectation::breve_expectation;
use crate::inequality::{check_inequality, choquet_series_test, levy_bound_check, BoundReport, Inequality, SeriesVerdict};

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityGridParams {
    pub n_grid: Vec<u64>,
    pub x_grid: Vec<f64>,
    /// `y = ratio * x` for the exponential inequality.
    pub y_ratios: Vec<f64>,
    pub alpha_grid: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Check {
    Inequality(Inequality, &'static str),
    Levy(f64),
}

/// Every inequality at every `(n, x)`: Kolmogorov upper, exponential,
/// Kolmogorov lower (at the ends and midpoint of the mean interval) and
/// Lévy. Each row passes iff the exact left-hand side respects the bound.
pub fn run_inequality_grid(model: &LatticeModel, params: &InequalityGridParams) -> Result<ExperimentResult> {
    let means = breve_expectation(model.set(), 1e-12)?;
    let (lo, hi) = (means.lower_mean, means.upper_mean);
    let mut checks = vec![Check::Inequality(Inequality::KolmogorovUpper, "kolmogorov_upper")];
    for &mu in &[lo, 0.5 * (lo + hi), hi] {
        checks.push(Check::Inequality(Inequality::KolmogorovLower { mu }, "kolmogorov_lower"));
    }
    checks.extend(params.alpha_grid.iter().map(|&a| Check::Levy(a)));
    let mut jobs = Vec::new();
    for &n in &params.n_grid {
        for &x in &params.x_grid {
            for c in &checks {
                jobs.push((n, x, c.clone()));
            }
            for &r in &params.y_ratios {
                jobs.push((n, x, Check::Inequality(Inequality::Exponential { y: r * x }, "exponential")));
            }
        }
    }
    let reports = jobs
        .par_iter()
        .map(|(n, x, c)| -> Result<(String, u64, BoundReport)> {
            Ok(match c {
                Check::Inequality(which, name) => {
                    let r = check_inequality(model, *which, *n as usize, *x)?;
                    let label = match which {
                        Inequality::KolmogorovLower { mu } => format!("{name} mu={mu}"),
                        Inequality::Exponential { y } => format!("{name} y={y}"),
                        Inequality::KolmogorovUpper => name.to_string(),
                    };
                    (format!("{label} x={x}"), *n, r)
                }
                Check::Levy(alpha) => (format!("levy alpha={alpha} x={x}"), *n, levy_bound_check(model, *n as usize, *x, *alpha)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = ExperimentResult::new("inequality_grid", model.set().label());
    let mut violations = 0;
    for (label, n, r) in reports {
        violations += usize::from(!r.satisfied);
        result.info(&label, None, n, "bound", r.rhs);
        result.check(&label, None, n, "exact_lhs", r.lhs, r.rhs, r.satisfied);
    }
    result.note(format!("{violations} violations"));
    Ok(result)
}

/// Summability of `V(|X| >= M i^{1/p})` against finiteness of `C_V(|X|^p)`;
/// passes iff the two verdicts agree.
pub fn run_choquet_series(set: &AmbiguitySet, p: f64, m: f64, horizon: usize) -> Result<ExperimentResult> {
    let r = choquet_series_test(set, p, m, horizon)?;
    let mut result = ExperimentResult::new("choquet_series", set.label());
    let k = r.series.horizon as u64;
    let code = match r.series.verdict {
        SeriesVerdict::Convergent => 1.0,
        SeriesVerdict::Divergent => -1.0,
        SeriesVerdict::Inconclusive => 0.0,
    };
    result.info("-", None, k, "series_partial_sum", r.series.partial_sum);
    result.info("-", None, k, "series_exponent", r.series.exponent.unwrap_or(f64::NAN));
    result.info("-", None, k, "series_verdict", code);
    result.info("-", None, 0, "choquet_p_moment", r.choquet);
    for (c, excess, capped) in &r.asymptotics {
        result.info("-", None, *c as u64, "scaled_mean_excess", *excess);
        result.info("-", None, *c as u64, "scaled_capped_second_moment", *capped);
    }
    result.check("-", None, k, "verdicts_agree", f64::from(u8::from(r.agree)), 1.0, r.agree);
    Ok(result)
}
