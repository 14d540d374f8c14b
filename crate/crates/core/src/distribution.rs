//! Distributions, ambiguity sets and interval events.
//!
//! An [`AmbiguitySet`] is a finite family of distributions; every
//! expectation in this crate is the maximum (upper) or minimum (lower) of
//! the members' linear expectations.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a finite discrete distribution.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// An interval of the real line, possibly unbounded, with explicit closure flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// `[a, +inf)`
    pub fn at_least(a: f64) -> Self {
        Self::new(a, f64::INFINITY, true, false)
    }

    /// `(a, +inf)`
    pub fn greater_than(a: f64) -> Self {
        Self::new(a, f64::INFINITY, false, false)
    }

    /// `(-inf, a]`
    pub fn at_most(a: f64) -> Self {
        Self::new(f64::NEG_INFINITY, a, false, true)
    }

    /// `(-inf, a)`
    pub fn less_than(a: f64) -> Self {
        Self::new(f64::NEG_INFINITY, a, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

/// A set of reals: an interval or the complement of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Inside(Interval),
    Outside(Interval),
}

impl Region {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            Region::Inside(iv) => iv.contains(x),
            Region::Outside(iv) => !iv.contains(x),
        }
    }

    pub fn complement(&self) -> Region {
        match *self {
            Region::Inside(iv) => Region::Outside(iv),
            Region::Outside(iv) => Region::Inside(iv),
        }
    }
}

/// A marginal event `{X_coord ∈ region}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub coord: usize,
    pub region: Region,
}

impl Event {
    pub fn new(coord: usize, region: Region) -> Self {
        Self { coord, region }
    }

    /// `{X_coord >= a}`
    pub fn at_least(coord: usize, a: f64) -> Self {
        Self::new(coord, Region::Inside(Interval::at_least(a)))
    }

    /// `{X_coord > a}`
    pub fn greater_than(coord: usize, a: f64) -> Self {
        Self::new(coord, Region::Inside(Interval::greater_than(a)))
    }

    pub fn interval(coord: usize, iv: Interval) -> Self {
        Self::new(coord, Region::Inside(iv))
    }

    pub fn complement(&self) -> Self {
        Self::new(self.coord, self.region.complement())
    }
}

/// One support point of a finite discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub value: Vec<f64>,
    pub weight: f64,
}

impl Atom {
    pub fn new(value: Vec<f64>, weight: f64) -> Self {
        Self { value, weight }
    }

    pub fn scalar(value: f64, weight: f64) -> Self {
        Self::new(vec![value], weight)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Finite discrete distribution on `R^d`. Atoms are kept in lexicographic
/// order of their values so that permuted inputs produce identical objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrete {
    atoms: Vec<Atom>,
    dim: usize,
}

impl Discrete {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let dim = atoms[0].value.len();
        if dim == 0 {
            return Err(Error::InvalidDistribution("atoms have dimension 0".into()));
        }
        let mut total = 0.0;
        for atom in &atoms {
            if atom.value.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: atom.value.len(),
                });
            }
            if atom.value.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite atom value {:?}",
                    atom.value
                )));
            }
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "atom weight {} is not strictly positive",
                    atom.weight
                )));
            }
            total += atom.weight;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "atom weights sum to {total}, not 1"
            )));
        }
        atoms.sort_by(|a, b| lex_cmp(&a.value, &b.value));
        if atoms.windows(2).any(|w| w[0].value == w[1].value) {
            return Err(Error::InvalidDistribution(
                "atom values must be pairwise distinct".into(),
            ));
        }
        Ok(Self { atoms, dim })
    }

    /// Builds a distribution from (value, weight) pairs, merging equal values
    /// and renormalising. Used for derived distributions (projections, mixtures).
    pub fn merged(pairs: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut pairs: Vec<(Vec<f64>, f64)> = pairs.into_iter().filter(|(_, w)| *w > 0.0).collect();
        pairs.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len());
        for (value, weight) in pairs {
            match atoms.last_mut() {
                Some(last) if last.value == value => last.weight += weight,
                _ => atoms.push(Atom::new(value, weight)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if total > 0.0 && (total - 1.0).abs() > WEIGHT_SUM_TOL {
            for a in &mut atoms {
                a.weight /= total;
            }
        }
        Self::new(atoms)
    }

    pub fn point_mass(value: Vec<f64>) -> Result<Self> {
        Self::new(vec![Atom::new(value, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expect<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        sorted_sum(self.atoms.iter().map(|a| a.weight * f(&a.value)))
    }

    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| self.expect(|x| x[j]))
            .collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| norm(&a.value))
            .fold(0.0, f64::max)
    }
}

/// Two-sided Pareto law on the real line: `P(|X| > x) = (scale/x)^alpha` for
/// `x >= scale`, positive with probability `right_mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedPareto {
    pub alpha: f64,
    pub scale: f64,
    pub right_mass: f64,
}

impl TwoSidedPareto {
    pub fn new(alpha: f64, scale: f64, right_mass: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidDistribution(format!("alpha {alpha} must be > 0")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidDistribution(format!("scale {scale} must be > 0")));
        }
        if !(0.0..=1.0).contains(&right_mass) {
            return Err(Error::InvalidDistribution(format!(
                "right_mass {right_mass} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            alpha,
            scale,
            right_mass,
        })
    }

    /// `P(|X| >= x)`; the law is continuous so `>=` and `>` agree.
    pub fn abs_tail(&self, x: f64) -> f64 {
        if x <= self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.alpha)
        }
    }

    /// `P(X >= a)`.
    pub fn upper_tail(&self, a: f64) -> f64 {
        if a > 0.0 {
            self.right_mass * self.abs_tail(a)
        } else {
            1.0 - (1.0 - self.right_mass) * self.abs_tail(-a)
        }
    }

    /// `E[min(|X|, c)]` for `c >= 0`.
    pub fn mean_abs_capped(&self, c: f64) -> f64 {
        let (a, s) = (self.alpha, self.scale);
        if c <= s {
            return c;
        }
        let tail = if (a - 1.0).abs() < 1e-12 {
            s * (c / s).ln()
        } else {
            s.powf(a) * (c.powf(1.0 - a) - s.powf(1.0 - a)) / (1.0 - a)
        };
        s + tail
    }

    /// `E[(|X| - c)^+]`, infinite when `alpha <= 1`.
    pub fn mean_excess(&self, c: f64) -> f64 {
        let (a, s) = (self.alpha, self.scale);
        if a <= 1.0 {
            return f64::INFINITY;
        }
        if c <= s {
            s * a / (a - 1.0) - c
        } else {
            s.powf(a) * c.powf(1.0 - a) / (a - 1.0)
        }
    }

    /// `E[min(X^2, c^2)]` for `c >= 0`.
    pub fn second_moment_capped(&self, c: f64) -> f64 {
        let (a, s) = (self.alpha, self.scale);
        if c <= s {
            return c * c;
        }
        // int_0^c 2u P(|X| > u) du
        let tail = if (a - 2.0).abs() < 1e-12 {
            2.0 * s * s * (c / s).ln()
        } else {
            2.0 * s.powf(a) * (c.powf(2.0 - a) - s.powf(2.0 - a)) / (2.0 - a)
        };
        s * s + tail
    }

    pub fn mean_abs(&self) -> f64 {
        if self.alpha <= 1.0 {
            f64::INFINITY
        } else {
            self.scale * self.alpha / (self.alpha - 1.0)
        }
    }

    pub fn mean(&self) -> Option<f64> {
        if self.alpha <= 1.0 {
            None
        } else {
            Some((2.0 * self.right_mass - 1.0) * self.mean_abs())
        }
    }

    pub fn second_moment(&self) -> f64 {
        if self.alpha <= 2.0 {
            f64::INFINITY
        } else {
            self.scale * self.scale * self.alpha / (self.alpha - 2.0)
        }
    }
}

/// A member of an ambiguity set.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    FiniteDiscrete(Discrete),
    TwoSidedPareto(TwoSidedPareto),
}

impl Distribution {
    pub fn discrete(atoms: Vec<Atom>) -> Result<Self> {
        Discrete::new(atoms).map(Distribution::FiniteDiscrete)
    }

    /// One-dimensional discrete distribution from `(value, weight)` pairs.
    pub fn scalar(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::discrete(pairs.iter().map(|&(v, w)| Atom::scalar(v, w)).collect())
    }

    pub fn point_mass(value: Vec<f64>) -> Result<Self> {
        Discrete::point_mass(value).map(Distribution::FiniteDiscrete)
    }

    pub fn pareto(alpha: f64, scale: f64, right_mass: f64) -> Result<Self> {
        TwoSidedPareto::new(alpha, scale, right_mass).map(Distribution::TwoSidedPareto)
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::FiniteDiscrete(d) => d.dim(),
            Distribution::TwoSidedPareto(_) => 1,
        }
    }

    pub fn as_discrete(&self) -> Option<&Discrete> {
        match self {
            Distribution::FiniteDiscrete(d) => Some(d),
            Distribution::TwoSidedPareto(_) => None,
        }
    }

    /// Mean vector, `None` when it does not exist.
    pub fn mean(&self) -> Option<Vec<f64>> {
        match self {
            Distribution::FiniteDiscrete(d) => Some(d.mean()),
            Distribution::TwoSidedPareto(p) => p.mean().map(|m| vec![m]),
        }
    }

    /// `E|X|^2` (Euclidean norm), possibly infinite.
    pub fn second_moment(&self) -> f64 {
        match self {
            Distribution::FiniteDiscrete(d) => d.expect(|x| x.iter().map(|v| v * v).sum()),
            Distribution::TwoSidedPareto(p) => p.second_moment(),
        }
    }

    /// Exact probability of the marginal event.
    pub fn probability(&self, event: &Event) -> f64 {
        match self {
            Distribution::FiniteDiscrete(d) => sorted_sum(
                d.atoms()
                    .iter()
                    .filter(|a| event.region.contains(a.value[event.coord]))
                    .map(|a| a.weight),
            ),
            Distribution::TwoSidedPareto(p) => {
                let inside = |iv: &Interval| {
                    let upper = |a: f64| {
                        if a == f64::NEG_INFINITY {
                            1.0
                        } else if a == f64::INFINITY {
                            0.0
                        } else {
                            p.upper_tail(a)
                        }
                    };
                    (upper(iv.lo) - upper(iv.hi)).max(0.0)
                };
                match event.region {
                    Region::Inside(iv) => inside(&iv),
                    Region::Outside(iv) => 1.0 - inside(&iv),
                }
            }
        }
    }

    /// Law of `<p, X>`.
    pub fn project(&self, p: &[f64]) -> Result<Distribution> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        match self {
            Distribution::FiniteDiscrete(d) => {
                let pairs = d
                    .atoms()
                    .iter()
                    .map(|a| (vec![dot(p, &a.value)], a.weight))
                    .collect();
                Discrete::merged(pairs).map(Distribution::FiniteDiscrete)
            }
            Distribution::TwoSidedPareto(_) => self.scaled(p[0]),
        }
    }

    /// Law of `a X`.
    pub fn scaled(&self, a: f64) -> Result<Distribution> {
        match self {
            Distribution::FiniteDiscrete(d) => {
                let pairs = d
                    .atoms()
                    .iter()
                    .map(|at| (at.value.iter().map(|v| a * v).collect(), at.weight))
                    .collect();
                Discrete::merged(pairs).map(Distribution::FiniteDiscrete)
            }
            Distribution::TwoSidedPareto(p) => {
                if a == 0.0 {
                    Distribution::point_mass(vec![0.0])
                } else if a > 0.0 {
                    Distribution::pareto(p.alpha, p.scale * a, p.right_mass)
                } else {
                    Distribution::pareto(p.alpha, p.scale * -a, 1.0 - p.right_mass)
                }
            }
        }
    }

    /// Law of `X + b`; discrete members only.
    pub fn shifted(&self, b: &[f64]) -> Result<Distribution> {
        match self {
            Distribution::FiniteDiscrete(d) => {
                if b.len() != d.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: d.dim(),
                        got: b.len(),
                    });
                }
                let pairs = d
                    .atoms()
                    .iter()
                    .map(|at| (at.value.iter().zip(b).map(|(v, s)| v + s).collect(), at.weight))
                    .collect();
                Discrete::merged(pairs).map(Distribution::FiniteDiscrete)
            }
            Distribution::TwoSidedPareto(_) => Err(Error::Unsupported(
                "shifting a two-sided Pareto member".into(),
            )),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::FiniteDiscrete(d) => {
                write!(f, "discrete[")?;
                for (i, a) in d.atoms().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{:?}@{}", a.value, a.weight)?;
                }
                write!(f, "]")
            }
            Distribution::TwoSidedPareto(p) => write!(
                f,
                "pareto(alpha={}, scale={}, right_mass={})",
                p.alpha, p.scale, p.right_mass
            ),
        }
    }
}

/// Finite, nonempty family of distributions of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySet {
    label: String,
    members: Vec<Distribution>,
}

impl AmbiguitySet {
    pub fn new(label: impl Into<String>, members: Vec<Distribution>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidSet("an ambiguity set needs at least one member".into()));
        };
        let dim = first.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self {
            label: label.into(),
            members,
        })
    }

    pub fn singleton(label: impl Into<String>, member: Distribution) -> Self {
        Self {
            label: label.into(),
            members: vec![member],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[Distribution] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn is_discrete(&self) -> bool {
        self.members.iter().all(|m| m.as_discrete().is_some())
    }

    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            members: self.members.clone(),
        }
    }

    /// Adds a member, keeping the label.
    pub fn with_member(&self, member: Distribution) -> Result<Self> {
        let mut members = self.members.clone();
        members.push(member);
        Self::new(self.label.clone(), members)
    }

    /// Member means, `None` entries where the mean does not exist.
    pub fn member_means(&self) -> Vec<Option<Vec<f64>>> {
        self.members.iter().map(Distribution::mean).collect()
    }

    /// The family of laws of `<p, X>`.
    pub fn project(&self, p: &[f64]) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.project(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.label.clone(), members)
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.scaled(a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.label.clone(), members)
    }

    pub fn shifted(&self, b: &[f64]) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.shifted(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.label.clone(), members)
    }

    /// The two-member set used throughout the examples: a fair coin on ±1 and
    /// a coin with `P(+1) = 0.75`.
    pub fn coin_pair() -> Self {
        let fair = Distribution::scalar(&[(1.0, 0.5), (-1.0, 0.5)]).expect("valid");
        let biased = Distribution::scalar(&[(1.0, 0.75), (-1.0, 0.25)]).expect("valid");
        Self::new("E1", vec![fair, biased]).expect("valid")
    }

    /// Point masses at the two unit vectors of the plane.
    pub fn unit_pair() -> Self {
        let a = Distribution::point_mass(vec![1.0, 0.0]).expect("valid");
        let b = Distribution::point_mass(vec![0.0, 1.0]).expect("valid");
        Self::new("V2", vec![a, b]).expect("valid")
    }

    /// [`AmbiguitySet::unit_pair`] plus the even mixture of its two members.
    pub fn unit_pair_with_mix() -> Self {
        let mix = Distribution::discrete(vec![
            Atom::new(vec![1.0, 0.0], 0.5),
            Atom::new(vec![0.0, 1.0], 0.5),
        ])
        .expect("valid");
        Self::unit_pair()
            .with_member(mix)
            .expect("valid")
            .relabeled("V2-mix")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sum of terms in increasing order of magnitude, with Neumaier compensation.
pub fn sorted_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut terms: Vec<f64> = terms.into_iter().collect();
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_rejects_bad_weights() {
        let err = Distribution::scalar(&[(1.0, 0.5), (-1.0, 0.49)]).unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
        assert!(Distribution::scalar(&[(1.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(Distribution::scalar(&[(1.0, 0.5), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn atoms_are_canonically_ordered() {
        let a = Distribution::scalar(&[(1.0, 0.25), (-1.0, 0.75)]).unwrap();
        let b = Distribution::scalar(&[(-1.0, 0.75), (1.0, 0.25)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn set_requires_common_dimension() {
        let a = Distribution::point_mass(vec![1.0]).unwrap();
        let b = Distribution::point_mass(vec![1.0, 2.0]).unwrap();
        assert!(AmbiguitySet::new("bad", vec![a, b]).is_err());
        assert!(AmbiguitySet::new("empty", vec![]).is_err());
    }

    #[test]
    fn pareto_tails() {
        let p = TwoSidedPareto::new(1.5, 1.0, 0.75).unwrap();
        assert_eq!(p.abs_tail(0.5), 1.0);
        assert!((p.abs_tail(4.0) - 0.125).abs() < 1e-15);
        assert!((p.upper_tail(4.0) - 0.75 * 0.125).abs() < 1e-15);
        assert!((p.upper_tail(-4.0) - (1.0 - 0.25 * 0.125)).abs() < 1e-15);
        assert_eq!(p.upper_tail(0.0), 0.75);
        assert!((p.mean_abs() - 3.0).abs() < 1e-15);
        // E[min(|X|, c)] -> E|X|
        assert!((p.mean_abs_capped(1e12) - 3.0).abs() < 1e-5);
    }

    #[test]
    fn projection_merges_atoms() {
        let set = AmbiguitySet::unit_pair_with_mix();
        let proj = set.project(&[1.0, 1.0]).unwrap();
        for m in proj.members() {
            let d = m.as_discrete().unwrap();
            assert_eq!(d.atoms().len(), 1);
            assert_eq!(d.atoms()[0].value, vec![1.0]);
        }
    }

    #[test]
    fn interval_membership() {
        assert!(Interval::at_least(1.0).contains(1.0));
        assert!(!Interval::greater_than(1.0).contains(1.0));
        assert!(Region::Outside(Interval::open(-1.0, 1.0)).contains(-1.0));
    }

    #[test]
    fn sorted_sum_is_accurate() {
        let s = sorted_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }
}
