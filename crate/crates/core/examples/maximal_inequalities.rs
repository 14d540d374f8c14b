//! Kolmogorov, exponential and Lévy maximal inequalities against exact
//! capacities, and the Choquet moment/series comparison.
//!
//! ```text
//! cargo run --release --example maximal_inequalities
//! ```

use subexp::distribution::{AmbiguitySet, Distribution};
use subexp::dp::LatticeModel;
use subexp::inequality::{
    borel_cantelli_diagnostic, check_inequality, choquet_series_test, levy_bound_check, Inequality,
};

fn main() -> subexp::error::Result<()> {
    let model = LatticeModel::new(&AmbiguitySet::coin_pair(), 1.0)?;
    for x in [2.0, 4.0, 8.0] {
        println!("{}", check_inequality(&model, Inequality::KolmogorovUpper, 16, x)?);
        println!("{}", check_inequality(&model, Inequality::Exponential { y: x }, 16, x)?);
        println!("{}", check_inequality(&model, Inequality::KolmogorovLower { mu: 0.25 }, 16, x)?);
        println!("{}", levy_bound_check(&model, 8, x, 0.3)?);
    }

    for (alpha, p) in [(1.5, 1.0), (1.2, 1.5)] {
        let set = AmbiguitySet::singleton("pareto", Distribution::pareto(alpha, 1.0, 0.5)?);
        let r = choquet_series_test(&set, p, 1.0, 10_000)?;
        println!(
            "Pareto({alpha}), p = {p}: series {:?} (exponent {:.3?}), C_V = {}, agree = {}",
            r.series.verdict, r.series.exponent, r.choquet, r.agree
        );
    }

    let summable: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
    println!("{:?}", borel_cantelli_diagnostic(&summable, 0.0));
    Ok(())
}
