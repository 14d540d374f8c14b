//! Strong-law experiments: the ends of the mean interval, oscillation,
//! interior targets, Marcinkiewicz rates and heavy-tailed divergence.
//!
//! ```text
//! cargo run --release --example strong_law
//! ```

use subexp::distribution::{AmbiguitySet, Distribution};
use subexp::experiments::{run_divergence, run_marcinkiewicz, run_slln, ExperimentResult, MarcinkiewiczParams, SllnParams};

fn show(r: &ExperimentResult) {
    println!("== {} on {}: passed = {}", r.experiment, r.model, r.passed());
    for row in &r.rows {
        println!(
            "  {:<28} seed {:?} n {:>7} {:<30} {:>12.6} {}",
            row.strategy,
            row.seed,
            row.n,
            row.statistic,
            row.value,
            row.verdict.as_str()
        );
    }
}

fn main() -> subexp::error::Result<()> {
    let coins = AmbiguitySet::coin_pair();
    show(&run_slln(
        &coins,
        &SllnParams {
            n: 1_000_000,
            seeds: vec![1, 2],
            mean_tolerance: 0.01,
            oscillation_tolerance: 0.05,
            targets: 5,
            burn_in: 0.01,
        },
    )?);
    show(&run_marcinkiewicz(
        &coins,
        &MarcinkiewiczParams {
            p: 1.5,
            n: 1_000_000,
            seeds: vec![1],
            envelope: 0.5,
            burn_in: 0.01,
            series_horizon: 10_000,
        },
    )?);
    let wild = AmbiguitySet::singleton("pareto-0.9", Distribution::pareto(0.9, 1.0, 0.5)?);
    show(&run_divergence(&wild, &[1_000, 10_000, 100_000], &[1])?);
    Ok(())
}
