use std::fs::File;
use std::io::BufReader;

use bernstein_core::projector::{
    density_inner, modulate, modulation_growth, multiplier_apply_abelian, multiplier_op_norms, op_norm_csv,
    project_spectral, read_grid, test_family, write_grid, GridFunction,
};
use bernstein_core::verify::CheckReport;
use bernstein_core::{ConvexBody, DensitySpec, HalfSpace};
use num_complex::Complex64;

use super::{bound_row, fmt_vec, unit_vectors, CheckOutput, Context, Params};
use crate::error::{CliError, CliResult};

/// `K ∩ {λ₁ ≤ c₁}` with `c` the centre of `K`.
fn default_target(k: &ConvexBody) -> Option<ConvexBody> {
    let c = k.center();
    let mut normal = vec![0.0; k.dim()];
    normal[0] = -1.0;
    k.intersect_with_cone(&[HalfSpace::new(normal, -c[0])])
        .ok()
        .filter(|t| !t.is_empty())
}

pub fn projector(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let spec = &ctx.scenario.spec;
    let b = ctx.function(p)?;
    let target = match p.body("target", ctx.m())? {
        Some(t) => t,
        None => default_target(&ctx.scenario.body)
            .ok_or_else(|| CliError::validation(p.path("target"), "no default target for this K; give one"))?,
    };
    let field = p.path("target");
    let core = |e| CliError::core(&field, e);
    let pa = project_spectral(&b.density, &target).map_err(core)?;
    let ppa = project_spectral(&pa, &target).map_err(core)?;
    let idem = pa
        .values
        .iter()
        .zip(&ppa.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let other = DensitySpec::EndpointSpike { sharpness: 3.0 }
        .build(b.quad.clone(), None)
        .map_err(core)?;
    let left = density_inner(spec, &pa, &other).map_err(core)?;
    let right = density_inner(spec, &b.density, &project_spectral(&other, &target).map_err(core)?).map_err(core)?;
    let full = density_inner(spec, &b.density, &b.density).map_err(core)?.re;
    let kept = density_inner(spec, &pa, &pa).map_err(core)?.re;
    let rows = vec![
        bound_row("projector_idempotent".into(), idem, 0.0),
        bound_row("projector_self_adjoint".into(), (left - right).norm(), 0.0),
        CheckReport::inequality("projector_contraction", kept.sqrt(), full.sqrt(), 0.0),
    ];
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}

fn max_abs(g: &GridFunction) -> f64 {
    g.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn multiplier(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    if ctx.n() != 0 || !(1..=2).contains(&m) {
        return Err(CliError::validation(
            format!("checks.{}", p.check),
            "needs an abelian group with one or two dimensions",
        ));
    }
    let body = &ctx.scenario.body;
    let field = p.path("points");
    let core = |e| CliError::core(&field, e);
    let points = p.usize_or("points", if m == 1 { 256 } else { 128 })?;
    let extent = p.positive_or("extent", 20.0)?;
    let seed = match p.get("seed") {
        Some(_) => p.usize_or("seed", 0)? as u64,
        None => ctx.require_seed(&p.path("seed"))?,
    };
    let size = p.usize_or("family", 9)?;
    let ps = p.f64s_or("p", vec![1.0, 1.5, 2.0, 3.0, 4.0])?;
    if ps.iter().any(|x| !(*x >= 1.0)) {
        return Err(CliError::validation(p.path("p"), "exponents must be at least 1"));
    }
    let dims = vec![points; m];
    let extents = vec![extent; m];
    let family = test_family(&dims, &extents, seed, size).map_err(core)?;
    let apply = |g: &GridFunction| multiplier_apply_abelian(g, body);
    let mut idem = 0.0_f64;
    for f in &family {
        let once = apply(f).map_err(core)?;
        let twice = apply(&once).map_err(core)?;
        let diff = once
            .data
            .iter()
            .zip(&twice.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        idem = idem.max(diff / max_abs(&once).max(f64::MIN_POSITIVE));
    }
    let norms = multiplier_op_norms(apply, &family, &ps).map_err(core)?;
    let mut rows = vec![bound_row("multiplier_idempotent".into(), idem, p.positive_or("idempotence_tol", 1e-8)?)];
    if let Some(two) = norms.iter().find(|r| r.p == 2.0) {
        rows.push(CheckReport::limit("multiplier_parseval", two.estimate, 1.0, 1e-6));
    }
    let mut files = vec![("multiplier_op_norms.csv".to_string(), op_norm_csv(&norms).into_bytes())];
    if let Some(path) = p.str_opt("input")? {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let g = read_grid(BufReader::new(file)).map_err(|e| CliError::core(p.path("input"), e))?;
        let out = apply(&g).map_err(|e| CliError::core(p.path("input"), e))?;
        let mut bytes = Vec::new();
        write_grid(&mut bytes, &out).map_err(|e| CliError::core(p.path("input"), e))?;
        files.push(("multiplier_output.bgrd".to_string(), bytes));
    }
    Ok(CheckOutput {
        rows,
        files,
        ..Default::default()
    })
}

pub fn modulation(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let (n, m) = (ctx.n(), ctx.m());
    let mut lambdas = Vec::new();
    for e in unit_vectors(m) {
        lambdas.push(e.iter().map(|x| -x).collect());
        lambdas.push(e);
    }
    let lambdas = p.vectors_or("lambda", m, lambdas)?;
    let mut z0 = vec![Complex64::new(0.0, 0.0); n];
    if let Some(z) = z0.first_mut() {
        *z = Complex64::new(0.5, 0.0);
    }
    let zeta0 = p.complex_vector_or("zeta0", n, z0)?;
    let ts = p.f64s_or("t", vec![1.0, 2.0, 3.0])?;
    let threshold = p.positive_or("threshold", 0.05)?;
    let b = ctx.function(p)?;
    let grid = ctx.grid(p)?;
    let field = p.path("lambda");
    let mut rows = Vec::new();
    for l in &lambdas {
        let flag = modulate(&b.f, l).map_err(|e| CliError::core(&field, e))?.unbounded;
        let g = modulation_growth(&b.f, l, &zeta0, &ts, &grid).map_err(|e| CliError::core(&field, e))?;
        let mut r = CheckReport::inequality(&format!("modulation[lambda={}]", fmt_vec(l)), g.exponent, threshold, 0.0);
        r.ratio = g.exponent / threshold;
        r.pass = (g.exponent > threshold) == flag;
        r.extras.push(("unbounded".into(), if flag { 1.0 } else { 0.0 }));
        r.series = g.ratios;
        rows.push(r.with_tail(g.tail_indicator));
    }
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}
