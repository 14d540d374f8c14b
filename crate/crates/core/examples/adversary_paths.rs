//! Sampling paths under stationary, oscillating and target-chasing
//! strategies.
//!
//! ```text
//! cargo run --release --example adversary_paths
//! ```

use subexp::distribution::AmbiguitySet;
use subexp::geometry::build_mean_set;
use subexp::sampler::{
    mixture_for_mean, oscillation_schedule, sample_path, stationary_for_target, stationary_max, stationary_min,
    target_chasing_schedule,
};

fn main() -> subexp::error::Result<()> {
    let coins = AmbiguitySet::coin_pair();
    let n = 100_000;
    for strategy in [stationary_max(&coins)?, stationary_min(&coins)?, stationary_for_target(&coins, 0.3)?] {
        let path = sample_path(&coins, &strategy, n, 42)?;
        println!("{:>12}: S_n/n = {:.4}", strategy.label, path.average(n)[0]);
    }

    let osc = oscillation_schedule(&coins, 16)?;
    let path = sample_path(&coins, &osc, n, 42)?;
    for end in osc.block_ends().into_iter().filter(|&e| e <= n as u64 && e >= 256) {
        println!("oscillation block end {end:>6}: average {:.4}", path.average(end as usize)[0]);
    }

    let v2 = AmbiguitySet::unit_pair_with_mix();
    println!("weights for mean (0.3, 0.7): {:?}", mixture_for_mean(&v2, &[0.3, 0.7])?);
    let m = build_mean_set(&v2, 0.02)?;
    let chase = target_chasing_schedule(&v2, &m, 3, 4, n as u64)?;
    let path = sample_path(&v2, &chase, n, 7)?;
    for end in chase.block_ends().into_iter().rev().take(3) {
        println!("{} block end {end}: average {:.3?}", chase.label, path.average(end as usize));
    }
    Ok(())
}
