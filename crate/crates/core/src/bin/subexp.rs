use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subexp::config::{ExperimentId, RunConfig};
use subexp::experiments::Verdict;
use subexp::runner::{execute, execute_file, Overrides, RunError, RunOutcome, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "subexp", version, about = "Experiments on sub-linear expectations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Replace the configured seeds with this one.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the sub-linear expectation axioms on random finite sets.
    CheckAxioms {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "results/axioms")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Exact maximal-inequality grid for the model in a config.
    InequalityGrid {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn report(outcome: Result<RunOutcome, RunError>) -> ExitCode {
    match outcome {
        Ok(o) => {
            let r = &o.result;
            let failed = r.failures().count();
            let checked = r.rows.iter().filter(|row| row.verdict != Verdict::Info).count();
            for row in r.failures() {
                println!(
                    "FAIL {} seed={:?} n={} {} = {} (tolerance {:?})",
                    row.strategy, row.seed, row.n, row.statistic, row.value, row.tolerance
                );
            }
            for note in &r.notes {
                println!("note: {note}");
            }
            println!(
                "{} on {}: {}/{} checks passed, run {} written to {}",
                r.experiment,
                r.model,
                checked - failed,
                checked,
                o.run_id,
                o.config.output_dir
            );
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            seed_override,
            out,
            threads,
        } => execute_file(
            &config,
            &Overrides {
                seed: seed_override,
                out,
                threads,
                ..Overrides::default()
            },
        ),
        Command::CheckAxioms {
            trials,
            seed,
            out,
            threads,
        } => {
            let mut config = RunConfig::defaults(ExperimentId::Axioms);
            Overrides {
                seed: Some(seed),
                out: Some(out),
                threads,
                trials: Some(trials),
                ..Overrides::default()
            }
            .apply(&mut config);
            execute(config)
        }
        Command::InequalityGrid { config, out, threads } => execute_file(
            &config,
            &Overrides {
                out,
                threads,
                experiment: Some(ExperimentId::InequalityGrid),
                ..Overrides::default()
            },
        ),
    };
    report(outcome)
}
