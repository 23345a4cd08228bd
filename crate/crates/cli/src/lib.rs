//! Scenario runner behind the `bernstein` binary.

pub mod checks;
pub mod error;
pub mod report;
pub mod scenario;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::checks::{find, Context};
use crate::error::{CliError, CliResult};
use crate::report::RunReport;
use crate::scenario::Scenario;

/// Name of the environment variable capping grid node counts.
pub const BUDGET_VAR: &str = "BERNSTEIN_BUDGET";

/// Reads the node cap from `BERNSTEIN_BUDGET`, if set.
pub fn budget_from_env() -> CliResult<Option<u128>> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map(Some)
            .map_err(|e| CliError::validation(BUDGET_VAR, e.to_string())),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::validation(BUDGET_VAR, e.to_string())),
    }
}

/// Checks to run with their parameters. An explicit selection keeps its
/// order and takes parameters from the scenario when it has them.
pub fn select(scenario: &Scenario, selection: Option<&[String]>) -> CliResult<Vec<(String, Value)>> {
    let chosen: Vec<(String, Value)> = match selection {
        None => scenario.checks.clone(),
        Some(names) => {
            let mut out: Vec<(String, Value)> = Vec::new();
            for name in names {
                if find(name).is_none() {
                    return Err(CliError::validation("--checks", format!("unknown check `{name}`")));
                }
                if out.iter().any(|(n, _)| n == name) {
                    continue;
                }
                let params = scenario
                    .checks
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, p)| p.clone())
                    .unwrap_or_else(|| Value::Object(Map::new()));
                out.push((name.clone(), params));
            }
            out
        }
    };
    if chosen.is_empty() {
        return Err(CliError::validation("checks", "no checks selected"));
    }
    if scenario.preset.is_some_and(|p| p.lambda_plus_empty()) {
        if let Some((name, _)) = chosen.iter().find(|(n, _)| !find(n).is_some_and(|c| c.without_cone)) {
            return Err(CliError::validation(
                format!("checks.{name}"),
                "the positivity cone of this group is empty; only group and support apply",
            ));
        }
    }
    Ok(chosen)
}

/// Runs the selected checks in parallel; the report keeps selection order.
pub fn run(
    scenario: &Scenario,
    selection: Option<&[String]>,
    seed: Option<u64>,
    budget: Option<u128>,
) -> CliResult<RunReport> {
    let chosen = select(scenario, selection)?;
    let seed = seed.or(scenario.seed);
    if scenario.density.needs_seed() && seed.is_none() {
        return Err(CliError::validation("density", "randomized density needs a seed (scenario `seed` or --seed)"));
    }
    let ctx = Context { scenario, seed, budget };
    let outputs: Vec<CliResult<_>> = chosen
        .par_iter()
        .map(|(name, params)| {
            let def = find(name).expect("validated name");
            def.run(&ctx, params).map(|o| (name.clone(), o))
        })
        .collect();
    let checks = outputs.into_iter().collect::<CliResult<Vec<_>>>()?;
    Ok(RunReport {
        scenario: scenario.id.clone(),
        seed,
        checks,
    })
}
