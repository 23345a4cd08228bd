use std::path::PathBuf;
use std::process::ExitCode;

use bernstein_cli::checks::REGISTRY;
use bernstein_cli::error::CliResult;
use bernstein_cli::{budget_from_env, report, run, scenario};
use bernstein_core::GroupPreset;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bernstein", version, about = "Check band-limited CR function inequalities on scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario and write report.csv, summary.json and plots/.
    Run {
        scenario: PathBuf,
        /// Comma-separated check names; defaults to the scenario's list.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Seed for randomized inputs; overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// List group presets with their positivity cones.
    Presets,
    /// List check names.
    ListChecks,
}

fn execute(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Presets => {
            for p in GroupPreset::ALL {
                println!("{:<14} {}", p.id(), p.lambda_plus_description());
            }
            Ok(true)
        }
        Command::ListChecks => {
            for c in REGISTRY {
                println!("{:<12} {}", c.name, c.description);
            }
            Ok(true)
        }
        Command::Run {
            scenario: path,
            checks,
            seed,
            out,
        } => {
            let budget = budget_from_env()?;
            let s = scenario::load(&path)?;
            let result = run(&s, checks.as_deref(), seed, budget)?;
            report::write_all(&out, &result)?;
            for r in result.rows() {
                println!(
                    "{} {} ratio={:.6e} tol={:.1e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.ratio,
                    r.tolerance
                );
            }
            Ok(result.all_pass())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
