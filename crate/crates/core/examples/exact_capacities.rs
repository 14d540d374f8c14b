//! Exact upper and lower capacities of path events by dynamic programming,
//! cross-checked against brute-force enumeration of adaptive policies.
//!
//! ```text
//! cargo run --example exact_capacities
//! ```

use subexp::distribution::{AmbiguitySet, Interval, Region};
use subexp::dp::{brute_force_value, dp_value, LatticeModel, Mode, PathFunctional};

fn main() -> subexp::error::Result<()> {
    let model = LatticeModel::new(&AmbiguitySet::coin_pair(), 1.0)?;
    let two_heads = PathFunctional::terminal_event(2, Region::Inside(Interval::at_least(2.0)));
    for mode in [Mode::Upper, Mode::Lower] {
        println!(
            "{mode:?} capacity of S_2 >= 2: dp {} brute force {}",
            dp_value(&model, &two_heads, mode)?,
            brute_force_value(&model, &two_heads, mode)?
        );
    }

    let hit = PathFunctional::running_max(3, 2.0);
    println!(
        "V(max_k S_k >= 2), n = 3: dp {} brute force {}",
        dp_value(&model, &hit, Mode::Upper)?,
        brute_force_value(&model, &hit, Mode::Upper)?
    );

    for n in [16, 64, 256, 1024] {
        let f = PathFunctional::terminal_average(n, |a| if !(-0.1..0.6).contains(&a) { 1.0 } else { 0.0 });
        println!("n = {n:>4}: V(S_n/n outside (-0.1, 0.6)) = {:.6}", dp_value(&model, &f, Mode::Upper)?);
    }

    let square = PathFunctional::terminal_sum(4, |s| s * s);
    println!("E^[S_4^2] = {}", dp_value(&model, &square, Mode::Upper)?);
    Ok(())
}
