//! Upper and lower expectations, capacities and Choquet integrals over a
//! finite ambiguity set.
//!
//! With a finite family every supremum is attained, so the upper expectation
//! is the largest member expectation and the upper capacity the largest member
//! probability. Unbounded test functions are admitted against a Pareto member
//! only when their growth is integrable: a bounded function always is, a
//! Lipschitz one needs `alpha > 1`, anything else is rejected as
//! [`Error::NonIntegrable`].

use std::fmt;
use std::sync::Arc;

use crate::distribution::{sorted_sum, AmbiguitySet, Distribution, Event, TwoSidedPareto};
use crate::error::{Error, Result};
use crate::quadrature;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A test function with declared Lipschitz and sup bounds.
///
/// `f64::INFINITY` is allowed for either bound and marks an unbounded
/// (respectively non-Lipschitz) function.
#[derive(Clone)]
pub struct TestFunction {
    f: Evaluator,
    lipschitz_bound: f64,
    sup_bound: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new<F>(f: F, lipschitz_bound: f64, sup_bound: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            lipschitz_bound,
            sup_bound,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn is_bounded(&self) -> bool {
        self.sup_bound.is_finite()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, 0.0, c.abs())
    }

    /// `x -> x[j]`
    pub fn coordinate(j: usize) -> Self {
        Self::new(move |x| x[j], 1.0, f64::INFINITY)
    }

    /// `x -> <p, x>`
    pub fn linear(p: Vec<f64>) -> Self {
        let lip = crate::distribution::norm(&p);
        Self::new(move |x| crate::distribution::dot(&p, x), lip, f64::INFINITY)
    }

    /// `x -> x[0]^2`; not Lipschitz.
    pub fn square() -> Self {
        Self::new(|x| x[0] * x[0], f64::INFINITY, f64::INFINITY)
    }

    /// Maximum of affine pieces `<a_i, x> + b_i`.
    pub fn max_affine(pieces: Vec<(Vec<f64>, f64)>) -> Self {
        assert!(!pieces.is_empty(), "max_affine needs at least one piece");
        let lip = pieces
            .iter()
            .map(|(a, _)| crate::distribution::norm(a))
            .fold(0.0, f64::max);
        let bounded = pieces.iter().all(|(a, _)| a.iter().all(|v| *v == 0.0));
        let sup = if bounded {
            pieces.iter().map(|(_, b)| *b).fold(f64::NEG_INFINITY, f64::max).abs()
        } else {
            f64::INFINITY
        };
        Self::new(
            move |x| {
                pieces
                    .iter()
                    .map(|(a, b)| crate::distribution::dot(a, x) + b)
                    .fold(f64::NEG_INFINITY, f64::max)
            },
            lip,
            sup,
        )
    }

    /// `x -> clamp((x[j] - a) / h, 0, 1)`: a ramp rising over `[a, a + h]`.
    pub fn ramp(j: usize, a: f64, h: f64) -> Self {
        Self::new(move |x| ((x[j] - a) / h).clamp(0.0, 1.0), 1.0 / h, 1.0)
    }

    pub fn neg(&self) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |x| -f(x)),
            lipschitz_bound: self.lipschitz_bound,
            sup_bound: self.sup_bound,
        }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |x| lambda * f(x)),
            lipschitz_bound: lambda.abs() * self.lipschitz_bound,
            sup_bound: lambda.abs() * self.sup_bound,
        }
    }

    pub fn add(&self, other: &TestFunction) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        Self {
            f: Arc::new(move |x| f(x) + g(x)),
            lipschitz_bound: self.lipschitz_bound + other.lipschitz_bound,
            sup_bound: self.sup_bound + other.sup_bound,
        }
    }

    pub fn max(&self, other: &TestFunction) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        Self {
            f: Arc::new(move |x| f(x).max(g(x))),
            lipschitz_bound: self.lipschitz_bound.max(other.lipschitz_bound),
            sup_bound: self.sup_bound.max(other.sup_bound),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |x| f(x) + c),
            lipschitz_bound: self.lipschitz_bound,
            sup_bound: self.sup_bound + c.abs(),
        }
    }

    /// Largest observed ratio `|f(x) - f(y)| / |x - y|` over the given pairs.
    pub fn observed_lipschitz(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        pairs
            .iter()
            .filter_map(|(x, y)| {
                let d: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (d > 0.0).then(|| (self.eval(x) - self.eval(y)).abs() / d)
            })
            .fold(0.0, f64::max)
    }
}

/// Ambiguity-set moment summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    /// Limit of truncated upper means.
    pub upper_mean: f64,
    /// Limit of truncated lower means.
    pub lower_mean: f64,
    /// Largest member second moment (may be infinite).
    pub upper_second: f64,
    pub truncation_used: f64,
    pub converged: bool,
}

fn pareto_expectation(p: &TwoSidedPareto, f: &TestFunction, label: &str) -> Result<f64> {
    if !f.is_bounded() && !(f.lipschitz_bound().is_finite() && p.alpha > 1.0) {
        return Err(Error::NonIntegrable {
            member: label.to_string(),
            reason: format!(
                "unbounded test function needs a Lipschitz bound and alpha > 1 (alpha = {})",
                p.alpha
            ),
        });
    }
    let (a, s, r) = (p.alpha, p.scale, p.right_mass);
    // X = ±s e^u with u ~ Exp(alpha).
    let h = |u: f64| {
        let x = s * u.exp();
        let v = r * f.eval(&[x]) + (1.0 - r) * f.eval(&[-x]);
        v * a * (-a * u).exp()
    };
    let f0 = f.eval(&[0.0]).abs();
    let tail_bound = |upper: f64| {
        if f.is_bounded() {
            f.sup_bound() * (-a * upper).exp()
        } else {
            f0 * (-a * upper).exp() + f.lipschitz_bound() * s * a * ((1.0 - a) * upper).exp() / (a - 1.0)
        }
    };
    let width = 1.0 / a.min(1.0);
    let mut total = Vec::new();
    let mut upper = 0.0;
    for _ in 0..20_000 {
        total.push(quadrature::integrate(h, upper, upper + width, 1e-15));
        upper += width;
        if tail_bound(upper) < 1e-14 {
            return Ok(sorted_sum(total));
        }
    }
    Err(Error::QuadratureNotConverged(format!(
        "expectation against {label} did not settle"
    )))
}

/// Linear expectation of `f` under one member.
pub fn member_expectation(member: &Distribution, f: &TestFunction) -> Result<f64> {
    match member {
        Distribution::FiniteDiscrete(d) => Ok(d.expect(|x| f.eval(x))),
        Distribution::TwoSidedPareto(p) => pareto_expectation(p, f, &member.to_string()),
    }
}

fn check_dim_arg(set: &AmbiguitySet, coord: usize) -> Result<()> {
    if coord >= set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: coord + 1,
        });
    }
    Ok(())
}

/// Member expectations of `f`, in member order.
pub fn member_expectations(set: &AmbiguitySet, f: &TestFunction) -> Result<Vec<f64>> {
    set.members().iter().map(|m| member_expectation(m, f)).collect()
}

/// `Ê[f(X)]`: the largest member expectation.
pub fn upper_expectation(set: &AmbiguitySet, f: &TestFunction) -> Result<f64> {
    Ok(member_expectations(set, f)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `ε̂[f(X)] = -Ê[-f(X)]`: the smallest member expectation.
pub fn lower_expectation(set: &AmbiguitySet, f: &TestFunction) -> Result<f64> {
    Ok(member_expectations(set, f)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Upper capacity of a marginal event: the largest member probability.
pub fn event_upper_capacity(set: &AmbiguitySet, event: &Event) -> Result<f64> {
    check_dim_arg(set, event.coord)?;
    Ok(set
        .members()
        .iter()
        .map(|m| m.probability(event))
        .fold(0.0, f64::max))
}

/// Lower capacity of a marginal event: the smallest member probability,
/// equal to one minus the upper capacity of the complement.
pub fn event_lower_capacity(set: &AmbiguitySet, event: &Event) -> Result<f64> {
    check_dim_arg(set, event.coord)?;
    Ok(set
        .members()
        .iter()
        .map(|m| m.probability(event))
        .fold(1.0, f64::min))
}

/// Nonnegative transforms accepted by [`choquet_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `|x|^p` (Euclidean norm for vectors)
    Abs(f64),
    /// `(x^+)^p`, one-dimensional
    Positive(f64),
    /// `(x^-)^p`, one-dimensional
    Negative(f64),
}

impl Transform {
    pub fn power(&self) -> f64 {
        match *self {
            Transform::Abs(p) | Transform::Positive(p) | Transform::Negative(p) => p,
        }
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        match *self {
            Transform::Abs(p) => crate::distribution::norm(x).powf(p),
            Transform::Positive(p) => x[0].max(0.0).powf(p),
            Transform::Negative(p) => (-x[0]).max(0.0).powf(p),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let p = self.power();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("transform power {p} must be > 0")));
        }
        if !matches!(self, Transform::Abs(_)) && dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: dim });
        }
        Ok(())
    }

    /// `P(g(X) >= t)` for a Pareto member, `t > 0`.
    fn pareto_tail(&self, p: &TwoSidedPareto, t: f64) -> f64 {
        let x = t.powf(1.0 / self.power());
        match self {
            Transform::Abs(_) => p.abs_tail(x),
            Transform::Positive(_) => p.right_mass * p.abs_tail(x),
            Transform::Negative(_) => (1.0 - p.right_mass) * p.abs_tail(x),
        }
    }
}

fn member_tail(member: &Distribution, transform: &Transform, t: f64) -> f64 {
    match member {
        Distribution::FiniteDiscrete(d) => sorted_sum(
            d.atoms()
                .iter()
                .filter(|a| transform.apply(&a.value) >= t)
                .map(|a| a.weight),
        ),
        Distribution::TwoSidedPareto(p) => transform.pareto_tail(p, t),
    }
}

/// `V(g(X) >= t)`.
pub fn tail_capacity(set: &AmbiguitySet, transform: &Transform, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    set.members()
        .iter()
        .map(|m| member_tail(m, transform, t))
        .fold(0.0, f64::max)
}

/// Running integral beyond which a Choquet integral is declared infinite.
pub const CHOQUET_DIVERGENCE_LEVEL: f64 = 1e12;
/// Relative tolerance of the Choquet tail integration.
pub const CHOQUET_REL_TOL: f64 = 1e-8;

/// `C_V[g(X)] = ∫_0^∞ V(g(X) >= t) dt`, possibly `+∞`.
///
/// Discrete families are integrated exactly as a step function. With Pareto
/// members the finite part is integrated segment by segment and the tail on
/// doubling intervals `[C, 2C]`, extrapolating the geometric decay of the
/// pieces. A tail whose pieces stop decaying, or whose running integral
/// passes [`CHOQUET_DIVERGENCE_LEVEL`], is infinite.
pub fn choquet_integral(set: &AmbiguitySet, transform: Transform) -> Result<f64> {
    transform.validate(set.dim())?;
    let mut breaks: Vec<f64> = vec![0.0];
    let mut paretos = Vec::new();
    for m in set.members() {
        match m {
            Distribution::FiniteDiscrete(d) => {
                breaks.extend(d.atoms().iter().map(|a| transform.apply(&a.value)));
            }
            Distribution::TwoSidedPareto(p) => {
                breaks.push(p.scale.powf(transform.power()));
                paretos.push(*p);
            }
        }
    }
    breaks.retain(|b| *b >= 0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    // Discrete members are constant on each (a, b]; their value there is the
    // tail at b.
    let segment_value = |a: f64, b: f64| -> f64 {
        let step: Vec<f64> = set
            .members()
            .iter()
            .filter(|m| m.as_discrete().is_some())
            .map(|m| member_tail(m, &transform, b))
            .collect();
        let step_max = step.iter().copied().fold(0.0, f64::max);
        if paretos.is_empty() {
            return (b - a) * step_max;
        }
        let integrand = |t: f64| {
            paretos
                .iter()
                .map(|p| transform.pareto_tail(p, t))
                .fold(step_max, f64::max)
        };
        quadrature::integrate(integrand, a, b, 1e-14 * (b - a).max(1.0))
    };
    let finite: Vec<f64> = breaks
        .windows(2)
        .map(|w| segment_value(w[0], w[1]))
        .collect();
    let mut total = sorted_sum(finite);
    if paretos.is_empty() {
        return Ok(total);
    }

    let tail = |t: f64| {
        paretos
            .iter()
            .map(|p| transform.pareto_tail(p, t))
            .fold(0.0, f64::max)
    };
    let mut c = *breaks.last().expect("nonempty");
    if c <= 0.0 {
        c = 1.0;
    }
    let mut prev: Option<f64> = None;
    let mut stalled = 0;
    while c < 1e300 {
        let cc = c;
        let integrand = move |u: f64| {
            let t = cc * u.exp();
            tail(t) * t
        };
        let coarse = (integrand(0.0) + integrand(std::f64::consts::LN_2)) * 0.5 * std::f64::consts::LN_2;
        let piece = quadrature::integrate(integrand, 0.0, std::f64::consts::LN_2, 1e-13 * coarse.max(1e-300));
        total += piece;
        if total > CHOQUET_DIVERGENCE_LEVEL {
            return Ok(f64::INFINITY);
        }
        if piece == 0.0 {
            return Ok(total);
        }
        if let Some(prev) = prev {
            let ratio = piece / prev;
            if ratio >= 1.0 - 1e-9 {
                stalled += 1;
                if stalled >= 8 {
                    return Ok(f64::INFINITY);
                }
            } else {
                stalled = 0;
                let rest = piece * ratio / (1.0 - ratio);
                if rest <= CHOQUET_REL_TOL * total {
                    return Ok(total + rest);
                }
            }
        }
        prev = Some(piece);
        c *= 2.0;
    }
    Err(Error::QuadratureNotConverged(format!(
        "Choquet integral of {transform:?} for set {} could not be bracketed",
        set.label()
    )))
}

/// Which of `X` and `-X` is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

fn member_truncated(member: &Distribution, c: f64, sign: Sign) -> f64 {
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    match member {
        Distribution::FiniteDiscrete(d) => d.expect(|x| (s * x[0]).clamp(-c, c)),
        Distribution::TwoSidedPareto(p) => s * (2.0 * p.right_mass - 1.0) * p.mean_abs_capped(c),
    }
}

fn require_scalar(set: &AmbiguitySet) -> Result<()> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    Ok(())
}

/// `Ê[(-c) ∨ (±X) ∧ c]` for a one-dimensional set.
pub fn truncated_expectation(set: &AmbiguitySet, c: f64, sign: Sign) -> Result<f64> {
    require_scalar(set)?;
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation level {c} must be > 0")));
    }
    Ok(set
        .members()
        .iter()
        .map(|m| member_truncated(m, c, sign))
        .fold(f64::NEG_INFINITY, f64::max))
}

const MAX_DOUBLINGS: usize = 1000;

/// Limits of truncated upper and lower means as the truncation level doubles.
///
/// Starts from `c = max(1, largest atom magnitude, largest Pareto scale)`, so
/// bounded families converge on the first comparison.
pub fn breve_expectation(set: &AmbiguitySet, tol: f64) -> Result<MomentReport> {
    require_scalar(set)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be > 0")));
    }
    let mut c: f64 = 1.0;
    for m in set.members() {
        match m {
            Distribution::FiniteDiscrete(d) => c = c.max(d.max_norm()),
            Distribution::TwoSidedPareto(p) => {
                if p.alpha <= 1.0 {
                    return Err(Error::NotConvergent(format!(
                        "{m} has alpha = {} <= 1, so its mean does not exist",
                        p.alpha
                    )));
                }
                c = c.max(p.scale);
            }
        }
    }
    let upper_second = set
        .members()
        .iter()
        .map(Distribution::second_moment)
        .fold(0.0, f64::max);
    let upper = |c: f64| truncated_expectation(set, c, Sign::Plus);
    let lower = |c: f64| truncated_expectation(set, c, Sign::Minus).map(|v| -v);
    let (mut u, mut l) = (upper(c)?, lower(c)?);
    for _ in 0..MAX_DOUBLINGS {
        let (u2, l2) = (upper(2.0 * c)?, lower(2.0 * c)?);
        if (u2 - u).abs() < tol && (l2 - l).abs() < tol {
            return Ok(MomentReport {
                upper_mean: u2,
                lower_mean: l2,
                upper_second,
                truncation_used: c,
                converged: true,
            });
        }
        u = u2;
        l = l2;
        c *= 2.0;
        if !c.is_finite() {
            break;
        }
    }
    Ok(MomentReport {
        upper_mean: u,
        lower_mean: l,
        upper_second,
        truncation_used: c,
        converged: false,
    })
}

/// `Ê̆[|X|]`, the largest member mean of the norm.
pub fn breve_abs_mean(set: &AmbiguitySet) -> f64 {
    set.members()
        .iter()
        .map(|m| match m {
            Distribution::FiniteDiscrete(d) => d.expect(crate::distribution::norm),
            Distribution::TwoSidedPareto(p) => p.mean_abs(),
        })
        .fold(0.0, f64::max)
}

/// `Ê[|X|^2]`, the largest member second moment.
pub fn upper_second_moment(set: &AmbiguitySet) -> f64 {
    set.members()
        .iter()
        .map(Distribution::second_moment)
        .fold(0.0, f64::max)
}

/// `Ê̆[(|X| - c)^+]`, one-dimensional or Euclidean norm.
pub fn upper_mean_excess(set: &AmbiguitySet, c: f64) -> f64 {
    set.members()
        .iter()
        .map(|m| match m {
            Distribution::FiniteDiscrete(d) => d.expect(|x| (crate::distribution::norm(x) - c).max(0.0)),
            Distribution::TwoSidedPareto(p) => p.mean_excess(c),
        })
        .fold(0.0, f64::max)
}

/// `Ê[|X|^2 ∧ c^2]`.
pub fn upper_capped_second_moment(set: &AmbiguitySet, c: f64) -> f64 {
    set.members()
        .iter()
        .map(|m| match m {
            Distribution::FiniteDiscrete(d) => d.expect(|x| {
                let n = crate::distribution::norm(x);
                (n * n).min(c * c)
            }),
            Distribution::TwoSidedPareto(p) => p.second_moment_capped(c),
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Interval;

    fn e1() -> AmbiguitySet {
        AmbiguitySet::coin_pair()
    }

    #[test]
    fn upper_and_lower_means() {
        let x = TestFunction::coordinate(0);
        assert_eq!(upper_expectation(&e1(), &x).unwrap(), 0.5);
        assert_eq!(lower_expectation(&e1(), &x).unwrap(), 0.0);
        assert_eq!(lower_expectation(&e1(), &x.neg()).unwrap(), -0.5);
        assert_eq!(upper_expectation(&e1(), &TestFunction::constant(7.0)).unwrap(), 7.0);
        assert_eq!(lower_expectation(&e1(), &TestFunction::constant(-3.0)).unwrap(), -3.0);
        assert_eq!(upper_expectation(&e1(), &TestFunction::square()).unwrap(), 1.0);
    }

    #[test]
    fn capacities_of_coin_pair() {
        let ev = Event::at_least(0, 1.0);
        assert_eq!(event_upper_capacity(&e1(), &ev).unwrap(), 0.75);
        assert_eq!(event_lower_capacity(&e1(), &ev).unwrap(), 0.5);
        assert_eq!(event_upper_capacity(&e1(), &Event::at_least(0, -2.0)).unwrap(), 1.0);
        let lower = event_lower_capacity(&e1(), &ev).unwrap();
        let via_complement = 1.0 - event_upper_capacity(&e1(), &ev.complement()).unwrap();
        assert_eq!(lower, via_complement);
        assert!(event_upper_capacity(&e1(), &Event::at_least(1, 0.0)).is_err());
    }

    #[test]
    fn choquet_of_coin_pair() {
        assert_eq!(choquet_integral(&e1(), Transform::Abs(1.0)).unwrap(), 1.0);
        assert_eq!(choquet_integral(&e1(), Transform::Positive(1.0)).unwrap(), 0.75);
    }

    #[test]
    fn choquet_of_pareto() {
        let set = AmbiguitySet::singleton("p", Distribution::pareto(1.5, 1.0, 0.5).unwrap());
        let v = choquet_integral(&set, Transform::Abs(1.0)).unwrap();
        assert!((v - 3.0).abs() < 1e-6, "{v}");
        let heavy = AmbiguitySet::singleton("h", Distribution::pareto(1.2, 1.0, 0.5).unwrap());
        assert_eq!(choquet_integral(&heavy, Transform::Abs(1.5)).unwrap(), f64::INFINITY);
        // boundary case p = alpha: pieces stop decaying
        assert_eq!(choquet_integral(&heavy, Transform::Abs(1.2)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn choquet_mixed_family() {
        // A point mass at 5 dominates the Pareto tail up to 5, then the tail takes over.
        let set = AmbiguitySet::new(
            "mixed",
            vec![
                Distribution::point_mass(vec![5.0]).unwrap(),
                Distribution::pareto(2.0, 1.0, 1.0).unwrap(),
            ],
        )
        .unwrap();
        // ∫_0^5 1 dt + ∫_5^∞ t^-2 dt = 5 + 0.2
        let v = choquet_integral(&set, Transform::Abs(1.0)).unwrap();
        assert!((v - 5.2).abs() < 1e-7, "{v}");
    }

    #[test]
    fn truncation() {
        assert_eq!(truncated_expectation(&e1(), 10.0, Sign::Plus).unwrap(), 0.5);
        assert_eq!(truncated_expectation(&e1(), 0.5, Sign::Plus).unwrap(), 0.25);
        assert_eq!(truncated_expectation(&e1(), 0.5, Sign::Minus).unwrap(), 0.0);
        assert!(truncated_expectation(&e1(), 0.0, Sign::Plus).is_err());
    }

    #[test]
    fn breve_means() {
        let r = breve_expectation(&e1(), 1e-12).unwrap();
        assert_eq!((r.upper_mean, r.lower_mean), (0.5, 0.0));
        assert!(r.converged);
        assert_eq!(r.truncation_used, 1.0);
        assert_eq!(r.upper_second, 1.0);

        let point = AmbiguitySet::singleton("3", Distribution::point_mass(vec![3.0]).unwrap());
        let r = breve_expectation(&point, 1e-12).unwrap();
        assert_eq!((r.upper_mean, r.lower_mean), (3.0, 3.0));

        let heavy = AmbiguitySet::singleton("h", Distribution::pareto(0.9, 1.0, 0.5).unwrap());
        assert!(matches!(breve_expectation(&heavy, 1e-6), Err(Error::NotConvergent(_))));

        let p = AmbiguitySet::singleton("p", Distribution::pareto(1.5, 1.0, 1.0).unwrap());
        let r = breve_expectation(&p, 1e-9).unwrap();
        assert!(r.converged);
        assert!((r.upper_mean - 3.0).abs() < 1e-6, "{}", r.upper_mean);
        assert!(r.upper_second.is_infinite());
    }

    #[test]
    fn pareto_expectation_matches_closed_form() {
        let p = AmbiguitySet::singleton("p", Distribution::pareto(1.5, 1.0, 1.0).unwrap());
        let v = upper_expectation(&p, &TestFunction::coordinate(0)).unwrap();
        assert!((v - 3.0).abs() < 1e-8, "{v}");
        // bounded: P(X >= 4) via a ramp of width 1e-9 is close to 1/8
        let clipped = TestFunction::new(|x| x[0].clamp(-2.0, 2.0), 1.0, 2.0);
        // E[min(X, 2)] = 1 + ∫_1^2 t^-1.5 dt
        let want = 1.0 + 2.0 * (1.0 - 2f64.powf(-0.5));
        assert!((upper_expectation(&p, &clipped).unwrap() - want).abs() < 1e-9);
        let heavy = AmbiguitySet::singleton("h", Distribution::pareto(0.9, 1.0, 0.5).unwrap());
        assert!(matches!(
            upper_expectation(&heavy, &TestFunction::coordinate(0)),
            Err(Error::NonIntegrable { .. })
        ));
        assert!(upper_expectation(&heavy, &clipped).is_ok());
    }

    #[test]
    fn pareto_event_probabilities() {
        let set = AmbiguitySet::singleton("p", Distribution::pareto(2.0, 1.0, 0.5).unwrap());
        let ev = Event::interval(0, Interval::closed(2.0, 4.0));
        let v = event_upper_capacity(&set, &ev).unwrap();
        assert!((v - 0.5 * (0.25 - 0.0625)).abs() < 1e-15);
    }
}
