use bernstein_core::verify::{check_group_invariants, check_support_identities};

use super::{CheckOutput, Context, Params};
use crate::error::{CliError, CliResult};

pub fn group(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let probes = p.usize_or("probes", 10_000)?;
    let seed = p.usize_or("seed", ctx.seed.unwrap_or(0) as usize)? as u64;
    let tol = p.positive_or("tol", 1e-12)?;
    let r = check_group_invariants(&ctx.scenario.spec, probes, seed, tol).map_err(|e| CliError::core(p.path("probes"), e))?;
    Ok(CheckOutput {
        rows: vec![r],
        ..Default::default()
    })
}

pub fn support(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let probes = p.usize_or("probes", 1_000)?;
    let seed = p.usize_or("seed", ctx.seed.unwrap_or(0) as usize)? as u64;
    let tol = p.positive_or("tol", 1e-12)?;
    let r = check_support_identities(&ctx.scenario.declared_body, probes, seed, tol)
        .map_err(|e| CliError::core(p.path("probes"), e))?;
    Ok(CheckOutput {
        rows: vec![r],
        ..Default::default()
    })
}
