//! Driving an experiment from a JSON config, the way the `subexp` binary
//! does, and reading back the written artefacts.
//!
//! ```text
//! cargo run --release --example run_config -- examples/configs/slln_e1.json
//! ```

use std::path::PathBuf;

use subexp::config::parse_config;
use subexp::runner::execute;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/three_series_e1.json"));
    let mut config = parse_config(&std::fs::read_to_string(&path)?)?;
    config.output_dir = std::env::temp_dir().join("subexp-example").display().to_string();
    println!("resolved config:\n{}", config.to_json());

    let outcome = execute(config)?;
    println!("run {} exit code {}", outcome.run_id, outcome.exit_code);
    let csv = std::fs::read_to_string(PathBuf::from(&outcome.config.output_dir).join("results.csv"))?;
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
