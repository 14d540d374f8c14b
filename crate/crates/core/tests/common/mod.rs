//! Shared generators and oracles for the integration tests.

#![allow(dead_code)]

use rand::Rng;

use subexp::distribution::{AmbiguitySet, Distribution, Interval, Region};
use subexp::dp::{Mode, PathFunctional};

/// 1 to 3 members, each with 1 to 3 distinct integer atoms in `[-2, 2]`.
pub fn random_lattice_set(rng: &mut impl Rng) -> AmbiguitySet {
    let members = rng.gen_range(1..=3);
    let dists = (0..members)
        .map(|_| {
            let atoms = rng.gen_range(1..=3);
            let mut values: Vec<i32> = (-2..=2).collect();
            for i in 0..atoms {
                let j = rng.gen_range(i..values.len());
                values.swap(i, j);
            }
            let raw: Vec<f64> = (0..atoms).map(|_| rng.gen_range(1..=9) as f64).collect();
            let total: f64 = raw.iter().sum();
            let pairs: Vec<(f64, f64)> = values[..atoms]
                .iter()
                .zip(&raw)
                .map(|(&v, &w)| (v as f64, w / total))
                .collect();
            Distribution::scalar(&pairs).unwrap()
        })
        .collect();
    AmbiguitySet::new("random", dists).unwrap()
}

pub fn random_region(rng: &mut impl Rng) -> Region {
    let lo = rng.gen_range(-6..=4) as f64 + if rng.gen_bool(0.3) { 0.5 } else { 0.0 };
    let hi = lo + rng.gen_range(0..=5) as f64;
    let iv = match rng.gen_range(0..4) {
        0 => Interval::at_least(lo),
        1 => Interval::less_than(hi),
        _ => Interval::new(lo, hi, rng.gen_bool(0.5), rng.gen_bool(0.5)),
    };
    if rng.gen_bool(0.5) {
        Region::Inside(iv)
    } else {
        Region::Outside(iv)
    }
}

/// A random functional of horizon `n` and a short description of it.
pub fn random_functional(rng: &mut impl Rng, n: usize) -> (PathFunctional, String) {
    match rng.gen_range(0..6) {
        0 => {
            let r = random_region(rng);
            (PathFunctional::terminal_event(n, r), format!("terminal {r:?}"))
        }
        1 => {
            let x = rng.gen_range(1..=6) as f64 / 2.0;
            (PathFunctional::running_max(n, x), format!("running max >= {x}"))
        }
        2 => {
            let (a, b, c) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
            );
            (
                PathFunctional::terminal_sum(n, move |s: f64| a * s * s + b * s + c * s.abs()),
                format!("{a:.3} s^2 + {b:.3} s + {c:.3} |s|"),
            )
        }
        3 => {
            let regions: Vec<Region> = (0..n).map(|_| random_region(rng)).collect();
            let desc = format!("first hit {regions:?}");
            (PathFunctional::first_hit(n, move |m| regions[m - 1]), desc)
        }
        4 => {
            let mut left = n;
            let mut blocks = Vec::new();
            while left > 0 {
                let len = rng.gen_range(1..=left);
                blocks.push((len, random_region(rng)));
                left -= len;
            }
            let desc = format!("all blocks {blocks:?}");
            (PathFunctional::all_blocks_hit(blocks), desc)
        }
        _ => {
            let mu = rng.gen_range(-4..=4) as f64 / 4.0;
            let x = rng.gen_range(1..=8) as f64 / 2.0;
            (PathFunctional::centered_abs(n, mu, x), format!("centred |S_m - m {mu}| >= {x}"))
        }
    }
}

pub fn random_mode(rng: &mut impl Rng) -> Mode {
    if rng.gen_bool(0.5) {
        Mode::Upper
    } else {
        Mode::Lower
    }
}

/// Optimum over adaptive member choices, by recursion over every history
/// of atoms. Works on the distributions directly, without a lattice.
pub fn history_tree_value(set: &AmbiguitySet, f: &PathFunctional, mode: Mode) -> f64 {
    fn go(set: &AmbiguitySet, f: &PathFunctional, mode: Mode, sums: &mut Vec<f64>) -> f64 {
        if sums.len() == f.horizon {
            return f.evaluate(sums);
        }
        let last = sums.last().copied().unwrap_or(0.0);
        let values = set.members().iter().map(|m| {
            let d = m.as_discrete().expect("discrete member");
            d.atoms()
                .iter()
                .map(|a| {
                    sums.push(last + a.value[0]);
                    let v = go(set, f, mode, sums);
                    sums.pop();
                    a.weight * v
                })
                .sum::<f64>()
        });
        match mode {
            Mode::Upper => values.fold(f64::NEG_INFINITY, f64::max),
            Mode::Lower => values.fold(f64::INFINITY, f64::min),
        }
    }
    go(set, f, mode, &mut Vec::new())
}
