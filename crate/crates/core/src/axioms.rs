//! Randomised checks that the finite-family expectation behaves as a
//! sub-linear expectation: monotonicity, constant preservation,
//! sub-additivity, positive homogeneity, conjugacy and the capacity
//! sandwich `Ê[f] <= V(A) <= Ê[g]` for `f <= 1_A <= g`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::{AmbiguitySet, Distribution, Event};
use crate::error::Result;
use crate::expectation::{
    event_lower_capacity, event_upper_capacity, lower_expectation, upper_expectation, TestFunction,
};
use crate::experiments::ExperimentResult;
use crate::rng::derive_seed;

/// Largest admissible violation, relative to the magnitude of the values
/// involved.
pub const AXIOM_TOL: f64 = 1e-12;
pub const MAX_MEMBERS: usize = 5;
pub const MAX_ATOMS: usize = 6;

/// Largest violation of each property on one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub trial: u64,
    pub members: usize,
    pub dim: usize,
    pub violations: Vec<(&'static str, f64)>,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.violations.iter().map(|v| v.1).fold(0.0, f64::max)
    }
}

/// A random set of `1..=5` members with `1..=6` atoms each, in dimension 1
/// or 2.
pub fn random_set(rng: &mut impl Rng) -> AmbiguitySet {
    let dim = rng.gen_range(1..=2);
    let members = rng.gen_range(1..=MAX_MEMBERS);
    let dists = (0..members)
        .map(|_| {
            let k = rng.gen_range(1..=MAX_ATOMS);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let atoms = raw
                .iter()
                .map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<f64>>())
                .zip(raw.iter().map(|w| w / total))
                .collect();
            Distribution::FiniteDiscrete(
                crate::distribution::Discrete::merged(atoms).expect("valid random weights"),
            )
        })
        .collect();
    AmbiguitySet::new("random", dists).expect("valid random set")
}

/// A random maximum of up to three affine pieces.
pub fn random_max_affine(rng: &mut impl Rng, dim: usize) -> TestFunction {
    let pieces = (0..rng.gen_range(1..=3))
        .map(|_| {
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            (a, rng.gen_range(-3.0..3.0))
        })
        .collect();
    TestFunction::max_affine(pieces)
}

fn excess(lhs: f64, rhs: f64, scale: f64) -> f64 {
    ((lhs - rhs) / (1.0 + scale)).max(0.0)
}

fn gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Checks every property on one random instance derived from `seed`.
pub fn check_trial(seed: u64, trial: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
    let set = random_set(&mut rng);
    let dim = set.dim();
    let f = random_max_affine(&mut rng, dim);
    let g = random_max_affine(&mut rng, dim);
    let c = rng.gen_range(-10.0..10.0);
    let lambda = rng.gen_range(0.01..10.0);
    let up = |h: &TestFunction| upper_expectation(&set, h);
    let (ef, eg) = (up(&f)?, up(&g)?);
    let mut v = Vec::new();

    let fg_max = f.max(&g);
    v.push(("monotonicity", excess(ef, up(&fg_max)?, ef.abs())));
    v.push(("constant_preserving", gap(up(&TestFunction::constant(c))?, c)));
    let sum = up(&f.add(&g))?;
    v.push(("sub_additivity", excess(sum, ef + eg, ef.abs() + eg.abs())));
    v.push(("positive_homogeneity", gap(up(&f.scale(lambda))?, lambda * ef)));
    v.push(("translation", gap(up(&f.add_constant(c))?, ef + c)));
    let lower = lower_expectation(&set, &f)?;
    v.push(("conjugacy", gap(lower, -up(&f.neg())?)));
    v.push(("lower_below_upper", excess(lower, ef, ef.abs())));

    let j = rng.gen_range(0..dim);
    let a = rng.gen_range(-5.0..5.0);
    let h = rng.gen_range(0.01..2.0);
    let event = Event::at_least(j, a);
    let cap = event_upper_capacity(&set, &event)?;
    let below = up(&TestFunction::ramp(j, a, h))?;
    let above = up(&TestFunction::ramp(j, a - h, h))?;
    v.push(("sandwich_lower", excess(below, cap, 1.0)));
    v.push(("sandwich_upper", excess(cap, above, 1.0)));
    let lower_cap = event_lower_capacity(&set, &event)?;
    let complement = event_upper_capacity(&set, &event.complement())?;
    v.push(("capacity_conjugacy", gap(lower_cap, 1.0 - complement)));
    v.push(("capacity_range", excess(lower_cap, cap, 1.0).max(excess(cap, 1.0, 1.0)).max(excess(0.0, lower_cap, 1.0))));

    Ok(AxiomReport {
        trial,
        members: set.len(),
        dim,
        violations: v,
    })
}

/// Runs `trials` random instances; one row per trial.
pub fn run_axioms(trials: u64, seed: u64) -> Result<ExperimentResult> {
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| check_trial(seed, t))
        .collect::<Result<Vec<_>>>()?;
    let mut result = ExperimentResult::new("axioms", "random finite sets");
    for r in reports {
        let worst = r.worst();
        result.check(
            &format!("trial-{}", r.trial),
            Some(seed),
            r.members as u64,
            "max_axiom_violation",
            worst,
            AXIOM_TOL,
            worst <= AXIOM_TOL,
        );
    }
    result.note(format!("{trials} random sets with up to {MAX_MEMBERS} members of up to {MAX_ATOMS} atoms; n column holds the member count"));
    Ok(result)
}
