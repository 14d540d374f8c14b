//! Exact capacities and sub-linear expectations of path functionals.
//!
//! The value of a functional of `S_1, ..., S_n` under the product
//! sub-linear expectation is computed by backward induction: at every step
//! the adversary (or its lower counterpart) picks the member that maximises
//! (minimises) the conditional value. For the functionals offered here the
//! current lattice sum plus one flag is a sufficient statistic, so Markov
//! policies attain the supremum over all history-dependent selections.
//! [`brute_force_value`] checks that claim on small instances without
//! relying on it.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::distribution::{sorted_sum, AmbiguitySet, Interval, Region};
use crate::error::{Error, Result};

/// Largest number of lattice states held for one step.
pub const STATE_LIMIT: usize = 10_000_000;
/// Relative tolerance for atoms to sit on the lattice.
pub const LATTICE_TOL: f64 = 1e-9;

const PARALLEL_MIN_STATES: usize = 4096;

/// A one-dimensional finitely supported model whose atoms are integer
/// multiples of a quantum `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    set: AmbiguitySet,
    quantum: f64,
    /// Per member: `(integer step, probability)`.
    steps: Vec<Vec<(i64, f64)>>,
    min_step: i64,
    max_step: i64,
}

impl LatticeModel {
    pub fn new(set: &AmbiguitySet, quantum: f64) -> Result<Self> {
        if set.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: set.dim(),
            });
        }
        if !(quantum > 0.0) || !quantum.is_finite() {
            return Err(Error::InvalidArgument(format!("quantum must be positive, got {quantum}")));
        }
        let mut steps = Vec::with_capacity(set.len());
        for member in set.members() {
            let d = member.as_discrete().ok_or_else(|| {
                Error::Unsupported(format!("lattice models need finite members, got {member}"))
            })?;
            let mut row = Vec::with_capacity(d.atoms().len());
            for atom in d.atoms() {
                let v = atom.value[0];
                let k = (v / quantum).round();
                if (v / quantum - k).abs() > LATTICE_TOL {
                    return Err(Error::NonLattice { value: v, quantum });
                }
                row.push((k as i64, atom.weight));
            }
            steps.push(row);
        }
        let min_step = steps.iter().flatten().map(|s| s.0).min().expect("nonempty set");
        let max_step = steps.iter().flatten().map(|s| s.0).max().expect("nonempty set");
        Ok(Self {
            set: set.clone(),
            quantum,
            steps,
            min_step,
            max_step,
        })
    }

    /// Finds the coarsest quantum `1/den * g` with `den <= 1000` that puts
    /// every atom on the lattice.
    pub fn inferred(set: &AmbiguitySet) -> Result<Self> {
        let values: Vec<f64> = set
            .members()
            .iter()
            .filter_map(|m| m.as_discrete())
            .flat_map(|d| d.atoms().iter().map(|a| a.value[0]))
            .collect();
        if !set.is_discrete() {
            return Err(Error::Unsupported("lattice models need finite members".into()));
        }
        for den in 1..=1000u32 {
            let scaled: Vec<f64> = values.iter().map(|v| v * den as f64).collect();
            if scaled.iter().all(|s| (s - s.round()).abs() <= LATTICE_TOL * s.abs().max(1.0)) {
                let g = scaled
                    .iter()
                    .map(|s| s.round().abs() as u64)
                    .fold(0, gcd)
                    .max(1);
                return Self::new(set, g as f64 / den as f64);
            }
        }
        Err(Error::NonLattice {
            value: values.first().copied().unwrap_or(f64::NAN),
            quantum: 1e-3,
        })
    }

    pub fn set(&self) -> &AmbiguitySet {
        &self.set
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn members(&self) -> usize {
        self.steps.len()
    }

    /// Member `i` as `(integer step, probability)` pairs.
    pub fn member_steps(&self, i: usize) -> &[(i64, f64)] {
        &self.steps[i]
    }

    /// The model with the increments shifted by `-shift` (which must be
    /// a lattice point).
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        Self::new(&self.set.shifted(&[-shift])?, self.quantum)
    }

    fn range_at(&self, m: usize) -> (i64, i64) {
        (self.min_step * m as i64, self.max_step * m as i64)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Upper,
    Lower,
}

impl Mode {
    fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            Mode::Upper => a.max(b),
            Mode::Lower => a.min(b),
        }
    }

    fn start(self) -> f64 {
        match self {
            Mode::Upper => f64::NEG_INFINITY,
            Mode::Lower => f64::INFINITY,
        }
    }
}

#[derive(Clone)]
pub enum FunctionalKind {
    /// `phi(S_n)`
    TerminalSum(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// `1{S_n in region}`
    TerminalEvent(Region),
    /// `1{S_m in regions[m-1] for some m <= n}`
    FirstHit(Vec<Region>),
    /// `1{every block sum lies in its region}`; blocks are consecutive and
    /// their lengths add up to the horizon.
    AllBlocksHit(Vec<(usize, Region)>),
}

impl fmt::Debug for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalKind::TerminalSum(_) => write!(f, "TerminalSum(..)"),
            FunctionalKind::TerminalEvent(r) => write!(f, "TerminalEvent({r:?})"),
            FunctionalKind::FirstHit(r) => write!(f, "FirstHit({} regions)", r.len()),
            FunctionalKind::AllBlocksHit(b) => write!(f, "AllBlocksHit({} blocks)", b.len()),
        }
    }
}

/// A functional of the partial sums `S_1, ..., S_n`.
#[derive(Debug, Clone)]
pub struct PathFunctional {
    pub horizon: usize,
    pub kind: FunctionalKind,
}

impl PathFunctional {
    pub fn terminal_sum<F>(horizon: usize, phi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            horizon,
            kind: FunctionalKind::TerminalSum(Arc::new(phi)),
        }
    }

    /// `phi(S_n / n)`
    pub fn terminal_average<F>(horizon: usize, phi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let n = horizon as f64;
        Self::terminal_sum(horizon, move |s| phi(s / n))
    }

    pub fn terminal_event(horizon: usize, region: Region) -> Self {
        Self {
            horizon,
            kind: FunctionalKind::TerminalEvent(region),
        }
    }

    /// `1{S_m in region(m) for some m <= n}`
    pub fn first_hit<F: Fn(usize) -> Region>(horizon: usize, region: F) -> Self {
        Self {
            horizon,
            kind: FunctionalKind::FirstHit((1..=horizon).map(region).collect()),
        }
    }

    /// `1{max_m S_m >= x}`
    pub fn running_max(horizon: usize, x: f64) -> Self {
        Self::first_hit(horizon, |_| Region::Inside(Interval::at_least(x)))
    }

    /// `1{max_m |S_m| >= x}`
    pub fn running_max_abs(horizon: usize, x: f64) -> Self {
        Self::first_hit(horizon, |_| Region::Outside(Interval::open(-x, x)))
    }

    /// `1{max_m |S_m - m mu| >= x}`
    pub fn centered_abs(horizon: usize, mu: f64, x: f64) -> Self {
        Self::first_hit(horizon, |m| {
            let c = m as f64 * mu;
            Region::Outside(Interval::open(c - x, c + x))
        })
    }

    /// `1{max_k (|S_k| - beta[k-1]) > level}`
    pub fn levy(beta: &[f64], level: f64) -> Self {
        Self::first_hit(beta.len(), |m| {
            let r = level + beta[m - 1];
            Region::Outside(Interval::closed(-r, r))
        })
    }

    pub fn all_blocks_hit(blocks: Vec<(usize, Region)>) -> Self {
        Self {
            horizon: blocks.iter().map(|b| b.0).sum(),
            kind: FunctionalKind::AllBlocksHit(blocks),
        }
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self.kind, FunctionalKind::TerminalSum(_))
    }

    /// Value on a path given by its partial sums `S_1, ..., S_n`.
    pub fn evaluate(&self, sums: &[f64]) -> f64 {
        assert_eq!(sums.len(), self.horizon, "path length differs from horizon");
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        match &self.kind {
            FunctionalKind::TerminalSum(phi) => phi(sums.last().copied().unwrap_or(0.0)),
            FunctionalKind::TerminalEvent(r) => {
                indicator(r.contains(sums.last().copied().unwrap_or(0.0)))
            }
            FunctionalKind::FirstHit(regions) => {
                indicator(sums.iter().zip(regions).any(|(s, r)| r.contains(*s)))
            }
            FunctionalKind::AllBlocksHit(blocks) => {
                let mut start = 0usize;
                let mut all = true;
                for (len, r) in blocks {
                    let before = if start == 0 { 0.0 } else { sums[start - 1] };
                    let end = start + len;
                    all &= r.contains(sums[end - 1] - before);
                    start = end;
                }
                indicator(all)
            }
        }
    }
}

fn validate(functional: &PathFunctional) -> Result<()> {
    if functional.horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if let FunctionalKind::AllBlocksHit(blocks) = &functional.kind {
        if blocks.is_empty() || blocks.iter().any(|b| b.0 == 0) {
            return Err(Error::InvalidArgument("blocks must be nonempty".into()));
        }
    }
    Ok(())
}

/// One backward step: `out[s] = opt_theta E_theta[next(s + X)]` for `s` in
/// `[lo, hi]`, where `next` covers sums `[next_lo, ...]`.
fn backward(model: &LatticeModel, mode: Mode, lo: i64, hi: i64, next: &[f64], next_lo: i64) -> Vec<f64> {
    let value = |s: i64| {
        model.steps.iter().fold(mode.start(), |acc, row| {
            let e = sorted_sum(row.iter().map(|&(k, p)| p * next[(s + k - next_lo) as usize]));
            mode.pick(acc, e)
        })
    };
    let width = (hi - lo + 1) as usize;
    if width >= PARALLEL_MIN_STATES {
        (0..width).into_par_iter().map(|i| value(lo + i as i64)).collect()
    } else {
        (0..width).map(|i| value(lo + i as i64)).collect()
    }
}

/// Exact value of the functional under the upper (lower) product
/// expectation, maximising (minimising) over all history-dependent member
/// selections.
pub fn dp_value(model: &LatticeModel, functional: &PathFunctional, mode: Mode) -> Result<f64> {
    validate(functional)?;
    let n = functional.horizon;
    let q = model.quantum;
    let (lo_n, hi_n) = model.range_at(n);
    let width = (hi_n - lo_n + 1) as usize;
    if width > STATE_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            states: width,
            limit: STATE_LIMIT,
        });
    }
    let grid = |lo: i64, hi: i64, f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (lo..=hi).map(|s| f(s as f64 * q)).collect()
    };
    match &functional.kind {
        FunctionalKind::TerminalSum(_) | FunctionalKind::TerminalEvent(_) => {
            let mut v = match &functional.kind {
                FunctionalKind::TerminalSum(phi) => grid(lo_n, hi_n, &|x| phi(x)),
                FunctionalKind::TerminalEvent(r) => {
                    grid(lo_n, hi_n, &|x| if r.contains(x) { 1.0 } else { 0.0 })
                }
                _ => unreachable!(),
            };
            let mut next_lo = lo_n;
            for m in (0..n).rev() {
                let (lo, hi) = model.range_at(m);
                v = backward(model, mode, lo, hi, &v, next_lo);
                next_lo = lo;
            }
            Ok(v[0])
        }
        FunctionalKind::FirstHit(regions) => {
            let hit = |m: usize, s: f64| regions[m - 1].contains(s);
            let mut v = grid(lo_n, hi_n, &|x| if hit(n, x) { 1.0 } else { 0.0 });
            let mut next_lo = lo_n;
            for m in (0..n).rev() {
                let (lo, hi) = model.range_at(m);
                v = backward(model, mode, lo, hi, &v, next_lo);
                if m >= 1 {
                    for (i, s) in (lo..=hi).enumerate() {
                        if hit(m, s as f64 * q) {
                            v[i] = 1.0;
                        }
                    }
                }
                next_lo = lo;
            }
            Ok(v[0])
        }
        FunctionalKind::AllBlocksHit(blocks) => {
            // Value of the remaining blocks, entered at a block start.
            let mut carry = 1.0;
            for (len, region) in blocks.iter().rev() {
                let (lo_b, hi_b) = model.range_at(*len);
                let mut v = grid(lo_b, hi_b, &|x| if region.contains(x) { carry } else { 0.0 });
                let mut next_lo = lo_b;
                for m in (0..*len).rev() {
                    let (lo, hi) = model.range_at(m);
                    v = backward(model, mode, lo, hi, &v, next_lo);
                    next_lo = lo;
                }
                carry = v[0];
            }
            Ok(carry)
        }
    }
}

/// Limits of [`brute_force_value`].
pub const BRUTE_FORCE_MAX_STEPS: usize = 4;
pub const BRUTE_FORCE_MAX_MEMBERS: usize = 3;
pub const BRUTE_FORCE_MAX_ATOMS: usize = 3;
const EXPLICIT_POLICY_LIMIT: f64 = 65536.0;

/// The history tree: node `i` holds the increments leading to it.
struct Tree {
    nodes: Vec<Vec<usize>>,
}

impl Tree {
    fn node_index(&self, history: &[usize]) -> usize {
        self.nodes
            .iter()
            .position(|h| h == history)
            .expect("history is in the tree")
    }
}

/// Oracle for [`dp_value`]: evaluates the functional on every full history
/// and optimises over every history-dependent policy.
///
/// A history is the sequence of atom indices drawn so far. When the number
/// of policies (one member per internal history node) is small they are
/// enumerated one by one; otherwise the optimum over policies is taken node
/// by node on the full tree, which is the same supremum because choices at
/// distinct nodes are unconstrained. Neither route merges histories with
/// equal sums.
pub fn brute_force_value(model: &LatticeModel, functional: &PathFunctional, mode: Mode) -> Result<f64> {
    validate(functional)?;
    let n = functional.horizon;
    let atoms = model.steps.iter().map(|r| r.len()).max().unwrap_or(0);
    if n > BRUTE_FORCE_MAX_STEPS || model.members() > BRUTE_FORCE_MAX_MEMBERS || atoms > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::TooLargeForBruteForce(format!(
            "n={n}, members={}, atoms={atoms}",
            model.members()
        )));
    }
    let q = model.quantum;
    let payoff = |path: &[(usize, usize)]| {
        let mut sums = Vec::with_capacity(n);
        let mut s = 0i64;
        for &(member, atom) in path {
            s += model.steps[member][atom].0;
            sums.push(s as f64 * q);
        }
        functional.evaluate(&sums)
    };
    // Under a fixed policy the atom indices drawn so far identify the node.
    let internal = (0..n).map(|k| atoms.pow(k as u32)).sum::<usize>() as f64;
    if (model.members() as f64).powf(internal) <= EXPLICIT_POLICY_LIMIT {
        let mut tree = Tree { nodes: Vec::new() };
        collect_nodes(model, n, &mut Vec::new(), &mut tree);
        let total = model.members().pow(tree.nodes.len() as u32);
        let mut best = mode.start();
        for code in 0..total {
            let mut policy = vec![0usize; tree.nodes.len()];
            let mut c = code;
            for p in policy.iter_mut() {
                *p = c % model.members();
                c /= model.members();
            }
            let v = policy_value(model, &tree, &policy, &payoff, &mut Vec::new(), &mut Vec::new(), n);
            best = mode.pick(best, v);
        }
        Ok(best)
    } else {
        Ok(tree_value(model, mode, &payoff, &mut Vec::new(), n))
    }
}

fn collect_nodes(model: &LatticeModel, n: usize, atoms: &mut Vec<usize>, tree: &mut Tree) {
    if atoms.len() == n {
        return;
    }
    tree.nodes.push(atoms.clone());
    let widest = model.steps.iter().map(|r| r.len()).max().unwrap_or(0);
    for a in 0..widest {
        atoms.push(a);
        collect_nodes(model, n, atoms, tree);
        atoms.pop();
    }
}

fn policy_value(
    model: &LatticeModel,
    tree: &Tree,
    policy: &[usize],
    payoff: &dyn Fn(&[(usize, usize)]) -> f64,
    atoms: &mut Vec<usize>,
    path: &mut Vec<(usize, usize)>,
    n: usize,
) -> f64 {
    if path.len() == n {
        return payoff(path);
    }
    let member = policy[tree.node_index(atoms)];
    let mut total = 0.0;
    for (a, &(_, p)) in model.steps[member].iter().enumerate() {
        atoms.push(a);
        path.push((member, a));
        total += p * policy_value(model, tree, policy, payoff, atoms, path, n);
        path.pop();
        atoms.pop();
    }
    total
}

fn tree_value(
    model: &LatticeModel,
    mode: Mode,
    payoff: &dyn Fn(&[(usize, usize)]) -> f64,
    path: &mut Vec<(usize, usize)>,
    n: usize,
) -> f64 {
    if path.len() == n {
        return payoff(path);
    }
    let mut best = mode.start();
    for member in 0..model.members() {
        let mut total = 0.0;
        for (a, &(_, p)) in model.steps[member].iter().enumerate() {
            path.push((member, a));
            total += p * tree_value(model, mode, payoff, path, n);
            path.pop();
        }
        best = mode.pick(best, total);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;

    fn e1() -> LatticeModel {
        LatticeModel::new(&AmbiguitySet::coin_pair(), 1.0).unwrap()
    }

    #[test]
    fn coin_pair_capacities() {
        let m = e1();
        let f = PathFunctional::terminal_event(2, Region::Inside(Interval::at_least(2.0)));
        assert!((dp_value(&m, &f, Mode::Upper).unwrap() - 0.5625).abs() < 1e-15);
        assert!((dp_value(&m, &f, Mode::Lower).unwrap() - 0.25).abs() < 1e-15);
        assert!((brute_force_value(&m, &f, Mode::Upper).unwrap() - 0.5625).abs() < 1e-15);
        assert!((brute_force_value(&m, &f, Mode::Lower).unwrap() - 0.25).abs() < 1e-15);
        let f = PathFunctional::terminal_event(3, Region::Inside(Interval::at_least(3.0)));
        assert!((brute_force_value(&m, &f, Mode::Upper).unwrap() - 0.421875).abs() < 1e-15);
        assert!((dp_value(&m, &f, Mode::Upper).unwrap() - 0.421875).abs() < 1e-15);
    }

    #[test]
    fn constant_functional() {
        let m = e1();
        let f = PathFunctional::terminal_sum(5, |_| 1.0);
        assert_eq!(dp_value(&m, &f, Mode::Upper).unwrap(), 1.0);
        assert_eq!(dp_value(&m, &f, Mode::Lower).unwrap(), 1.0);
    }

    #[test]
    fn single_step_is_member_extremes() {
        let m = e1();
        let f = PathFunctional::terminal_event(1, Region::Inside(Interval::at_least(1.0)));
        assert_eq!(brute_force_value(&m, &f, Mode::Upper).unwrap(), 0.75);
        assert_eq!(brute_force_value(&m, &f, Mode::Lower).unwrap(), 0.5);
    }

    #[test]
    fn running_max_uses_history() {
        let m = e1();
        let f = PathFunctional::running_max(2, 1.0);
        let v = dp_value(&m, &f, Mode::Upper).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        assert_eq!(v, brute_force_value(&m, &f, Mode::Upper).unwrap());
        let f = PathFunctional::running_max(3, 1.0);
        let v = dp_value(&m, &f, Mode::Upper).unwrap();
        assert!((v - (0.75 + 0.25 * 0.75 * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn blocks_dominate_product_of_marginals() {
        let m = e1();
        let f = PathFunctional::all_blocks_hit(vec![
            (1, Region::Inside(Interval::at_least(1.0))),
            (1, Region::Inside(Interval::at_least(1.0))),
            (2, Region::Inside(Interval::at_least(2.0))),
        ]);
        let v = dp_value(&m, &f, Mode::Upper).unwrap();
        assert!((v - 0.75 * 0.75 * 0.5625).abs() < 1e-15);
        assert!((v - brute_force_value(&m, &f, Mode::Upper).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn inferred_quantum() {
        let set = AmbiguitySet::new(
            "h",
            vec![Distribution::scalar(&[(-0.5, 0.5), (1.5, 0.5)]).unwrap()],
        )
        .unwrap();
        assert_eq!(LatticeModel::inferred(&set).unwrap().quantum(), 0.5);
        assert_eq!(LatticeModel::inferred(&AmbiguitySet::coin_pair()).unwrap().quantum(), 1.0);
        let bad = LatticeModel::new(&set, 1.0);
        assert!(matches!(bad, Err(Error::NonLattice { .. })));
    }

    #[test]
    fn guards() {
        let m = e1();
        let f = PathFunctional::running_max(5, 1.0);
        assert!(matches!(
            brute_force_value(&m, &f, Mode::Upper),
            Err(Error::TooLargeForBruteForce(_))
        ));
        let f = PathFunctional::running_max(6_000_000, 1.0);
        assert!(matches!(
            dp_value(&m, &f, Mode::Upper),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn averages_approach_the_mean_interval() {
        let m = e1();
        let mut previous = f64::INFINITY;
        for n in [64, 128, 256] {
            let f = PathFunctional::terminal_average(n, |x| x * x);
            let err = dp_value(&m, &f, Mode::Upper).unwrap() - 0.25;
            assert!(err > 0.0 && err < previous);
            previous = err;
        }
    }
}
