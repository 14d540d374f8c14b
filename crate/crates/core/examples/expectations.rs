//! Upper and lower expectations, capacities, truncated means and Choquet
//! integrals for a two-coin family and a Pareto member.
//!
//! ```text
//! cargo run --example expectations
//! ```

use subexp::distribution::{AmbiguitySet, Distribution, Event};
use subexp::expectation::{
    breve_expectation, choquet_integral, event_lower_capacity, event_upper_capacity, lower_expectation,
    upper_expectation, TestFunction, Transform,
};

fn main() -> subexp::error::Result<()> {
    let coins = AmbiguitySet::coin_pair();
    let x = TestFunction::coordinate(0);
    println!("E^[X] = {}", upper_expectation(&coins, &x)?);
    println!("e^[X] = {}", lower_expectation(&coins, &x)?);
    println!("E^[X^2] = {}", upper_expectation(&coins, &TestFunction::square())?);

    let up = Event::at_least(0, 1.0);
    println!(
        "V(X >= 1) = {}, v(X >= 1) = {}",
        event_upper_capacity(&coins, &up)?,
        event_lower_capacity(&coins, &up)?
    );

    let kinked = TestFunction::max_affine(vec![(vec![1.0], 0.0), (vec![-2.0], 0.5)]);
    println!("E^[max(x, 0.5 - 2x)] = {}", upper_expectation(&coins, &kinked)?);

    let heavy = coins.with_member(Distribution::pareto(1.5, 1.0, 0.6)?)?;
    let means = breve_expectation(&heavy, 1e-10)?;
    println!(
        "with a Pareto(1.5) member: mean interval [{:.6}, {:.6}] (truncation {}, converged {})",
        means.lower_mean, means.upper_mean, means.truncation_used, means.converged
    );
    println!("C_V(|X|) = {:.6}", choquet_integral(&heavy, Transform::Abs(1.0))?);
    println!("C_V(|X|^1.6) = {}", choquet_integral(&heavy, Transform::Abs(1.6))?);
    Ok(())
}
