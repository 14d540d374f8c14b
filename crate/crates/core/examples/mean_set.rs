//! The mean set of a vector model: support values on a direction net,
//! distances and a grid of interior targets.
//!
//! ```text
//! cargo run --example mean_set
//! ```

use subexp::distribution::AmbiguitySet;
use subexp::geometry::{build_mean_set, support_function};

fn main() -> subexp::error::Result<()> {
    let set = AmbiguitySet::unit_pair_with_mix();
    let m = build_mean_set(&set, 0.05)?;
    println!("{} directions, bounding box {:?}", m.net().len(), m.bounding_box());
    println!("support at (1, 1)/sqrt2: {:.6}", support_function(&set, &[0.5f64.sqrt(), 0.5f64.sqrt()])?);

    for y in [[0.5, 0.5], [1.0, 0.0], [0.0, 0.0], [1.0, 1.0]] {
        println!("dist({y:?}, M) = {:.4}", m.distance(&y));
    }
    for p in m.grid_points(5)? {
        println!("target {:.3?} inside: {}", p, m.contains(&p, m.default_tolerance()));
    }

    let coins = build_mean_set(&AmbiguitySet::coin_pair(), 0.1)?;
    println!("one-dimensional mean set: {:?}", coins.interval());
    Ok(())
}
