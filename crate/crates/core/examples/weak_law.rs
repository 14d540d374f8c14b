//! The weak law: exact capacities of `S_n/n` leaving the mean interval, and
//! Monte Carlo frequencies for a planar model.
//!
//! ```text
//! cargo run --release --example weak_law
//! ```

use subexp::distribution::AmbiguitySet;
use subexp::dp::LatticeModel;
use subexp::experiments::{run_weak_lln, run_weak_lln_mc, WeakLlnMcParams, WeakLlnParams};

fn main() -> subexp::error::Result<()> {
    let model = LatticeModel::new(&AmbiguitySet::coin_pair(), 1.0)?;
    let exact = run_weak_lln(
        &model,
        &WeakLlnParams {
            n_grid: vec![32, 64, 128, 256, 512],
            epsilon: 0.1,
            capacity_threshold: 0.05,
            interior_threshold: 0.9,
            bank_tolerance: 0.05,
        },
    )?;
    for row in &exact.rows {
        println!("{:>4} {:<36} {:.6} {}", row.n, row.statistic, row.value, row.verdict.as_str());
    }

    let mc = run_weak_lln_mc(
        &AmbiguitySet::unit_pair_with_mix(),
        &WeakLlnMcParams {
            n_grid: vec![16, 64, 256],
            epsilon: 0.1,
            capacity_threshold: 0.05,
            replicates: 100,
            seed: 3,
            delta: 0.02,
        },
    )?;
    for row in mc.rows_named("max_frequency_dist_at_least_eps") {
        println!("planar model, n = {}: worst frequency {}", row.n, row.value);
    }
    Ok(())
}
