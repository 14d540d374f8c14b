//! Convergence of `sum a_n X_n` for `a_n = n^-2` and its harmonic control.
//!
//! ```text
//! cargo run --release --example three_series
//! ```

use subexp::distribution::AmbiguitySet;
use subexp::experiments::{run_three_series, ScaledSequence, ThreeSeriesParams};

fn main() -> subexp::error::Result<()> {
    let coins = AmbiguitySet::coin_pair();
    for exponent in [2.0, 1.0] {
        let r = run_three_series(
            &coins,
            &ThreeSeriesParams {
                scales: ScaledSequence::Power { exponent },
                c: 1.0,
                n: 100_000,
                seeds: vec![1],
                series_horizon: 10_000,
                cauchy_start: 1_000,
                cauchy_tolerance: 0.01,
            },
        )?;
        println!("a_n = n^-{exponent}: passed = {}", r.passed());
        for row in &r.rows {
            println!("  {:<22} {:<24} {:.6} {}", row.strategy, row.statistic, row.value, row.verdict.as_str());
        }
    }
    Ok(())
}
