mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subexp::distribution::{AmbiguitySet, Interval, Region};
use subexp::dp::{brute_force_value, dp_value, LatticeModel, Mode, PathFunctional};
use subexp::error::Error;

const TOL: f64 = 1e-12;

#[test]
fn two_step_examples() {
    let set = AmbiguitySet::coin_pair();
    let model = LatticeModel::new(&set, 1.0).unwrap();
    let f = PathFunctional::terminal_event(2, Region::Inside(Interval::at_least(2.0)));
    assert!((dp_value(&model, &f, Mode::Upper).unwrap() - 0.5625).abs() < TOL);
    assert!((dp_value(&model, &f, Mode::Lower).unwrap() - 0.25).abs() < TOL);
    assert!((brute_force_value(&model, &f, Mode::Upper).unwrap() - 0.5625).abs() < TOL);
    assert!((brute_force_value(&model, &f, Mode::Lower).unwrap() - 0.25).abs() < TOL);
}

#[test]
fn random_instances_up_to_three_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..400 {
        let set = common::random_lattice_set(&mut rng);
        let model = LatticeModel::new(&set, 1.0).unwrap();
        let n = rng.gen_range(1..=3);
        let (f, desc) = common::random_functional(&mut rng, n);
        let mode = common::random_mode(&mut rng);
        let dp = dp_value(&model, &f, mode).unwrap();
        let bf = brute_force_value(&model, &f, mode).unwrap();
        let tree = common::history_tree_value(&set, &f, mode);
        assert!((dp - bf).abs() <= TOL, "instance {i}: {desc} {mode:?} dp {dp} brute force {bf}");
        assert!((dp - tree).abs() <= TOL, "instance {i}: {desc} {mode:?} dp {dp} tree {tree}");
    }
}

#[test]
fn four_steps_against_the_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let set = common::random_lattice_set(&mut rng);
        let model = LatticeModel::new(&set, 1.0).unwrap();
        let (f, desc) = common::random_functional(&mut rng, 4);
        let mode = common::random_mode(&mut rng);
        let dp = dp_value(&model, &f, mode).unwrap();
        let bf = brute_force_value(&model, &f, mode).unwrap();
        let tree = common::history_tree_value(&set, &f, mode);
        assert!((dp - bf).abs() <= TOL && (dp - tree).abs() <= TOL, "{desc}: {dp} {bf} {tree}");
    }
}

#[test]
fn brute_force_refuses_large_instances() {
    let model = LatticeModel::new(&AmbiguitySet::coin_pair(), 1.0).unwrap();
    let f = PathFunctional::running_max(5, 1.0);
    assert!(matches!(brute_force_value(&model, &f, Mode::Upper), Err(Error::TooLargeForBruteForce(_))));
}

#[test]
fn linear_payoff_adds_member_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let set = common::random_lattice_set(&mut rng);
        let model = LatticeModel::new(&set, 1.0).unwrap();
        let means: Vec<f64> = set.member_means().into_iter().map(|m| m.unwrap()[0]).collect();
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        let n = rng.gen_range(1..=12);
        let f = PathFunctional::terminal_sum(n, |s| s);
        assert!((dp_value(&model, &f, Mode::Upper).unwrap() - n as f64 * hi).abs() < 1e-9);
        assert!((dp_value(&model, &f, Mode::Lower).unwrap() - n as f64 * lo).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dp_agrees_with_tree(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = common::random_lattice_set(&mut rng);
        let model = LatticeModel::new(&set, 1.0).unwrap();
        let (f, desc) = common::random_functional(&mut rng, n);
        for mode in [Mode::Upper, Mode::Lower] {
            let dp = dp_value(&model, &f, mode).unwrap();
            let tree = common::history_tree_value(&set, &f, mode);
            prop_assert!((dp - tree).abs() <= TOL, "{} {:?}: {} vs {}", desc, mode, dp, tree);
        }
    }

    #[test]
    fn upper_dominates_lower(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = common::random_lattice_set(&mut rng);
        let model = LatticeModel::new(&set, 1.0).unwrap();
        let (f, _) = common::random_functional(&mut rng, n);
        let upper = dp_value(&model, &f, Mode::Upper).unwrap();
        let lower = dp_value(&model, &f, Mode::Lower).unwrap();
        prop_assert!(lower <= upper + TOL);
        if f.is_indicator() {
            prop_assert!((-TOL..=1.0 + TOL).contains(&lower) && upper <= 1.0 + TOL);
        }
    }
}
