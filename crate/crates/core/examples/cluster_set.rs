//! Visiting a grid of targets in a planar mean set and measuring how close
//! the visits come.
//!
//! ```text
//! cargo run --release --example cluster_set
//! ```

use subexp::distribution::AmbiguitySet;
use subexp::experiments::{run_cluster_set, ClusterParams};

fn main() -> subexp::error::Result<()> {
    let r = run_cluster_set(
        &AmbiguitySet::unit_pair_with_mix(),
        &ClusterParams {
            targets: 5,
            n: 1_000_000,
            seeds: vec![1],
            delta: 0.01,
            outer_tolerance: 0.05,
            hausdorff_tolerance: 0.15,
            burn_in: 0.01,
        },
    )?;
    for row in &r.rows {
        println!("{:<20} {:<28} {:.5} {}", row.strategy, row.statistic, row.value, row.verdict.as_str());
    }
    Ok(())
}
