use std::f64::consts::PI;

use bernstein_core::sampling::{
    grid_points_e, grid_points_f, lattice_product, sampling_bounds, wks_reconstruct, Lattice, Metric, Window,
};
use bernstein_core::verify::CheckReport;
use bernstein_core::DensitySpec;
use serde_json::Value;

use super::{bound_row, fmt_num, CheckOutput, Context, Params, Plot};
use crate::error::{CliError, CliResult};

/// The min bound counts as attained when `lower ≥ upper / MIN_BOUND_SLACK`.
pub const MIN_BOUND_SLACK: f64 = 2.0;

/// `κ` for a symmetric interval `[-κ, κ]`.
fn kappa(ctx: &Context, p: &Params) -> CliResult<f64> {
    let k = &ctx.scenario.body;
    if ctx.n() != 0 || ctx.m() != 1 || !k.is_symmetric() {
        return Err(CliError::validation(
            format!("checks.{}", p.check),
            "needs a one-dimensional abelian group with K = [-κ, κ]",
        ));
    }
    Ok(k.support(&[1.0]))
}

pub fn sampling(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    if ctx.n() == 0 {
        identity(ctx, p)
    } else {
        nilpotent(ctx, p)
    }
}

/// `Σ |f(kπ/κ)|² = (κ/π) ‖f‖²` for spectrum in `[-κ, κ]`.
fn identity(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let kappa = kappa(ctx, p)?;
    let truncation = p.usize_or("truncation", 2000)? as i64;
    let tol = p.positive_or("tol", 1e-6)?;
    let b = ctx.function(p)?;
    let step = PI / kappa;
    let xs: Vec<Vec<f64>> = (-truncation..=truncation).map(|k| vec![k as f64 * step]).collect();
    let reach = truncation as f64 * step;
    let window = Window::new(vec![-reach], vec![reach]).map_err(|e| CliError::core(p.path("truncation"), e))?;
    let lat = lattice_product(&ctx.scenario.spec, &[vec![]], &xs, Metric::Euclidean, &window, step / 4.0)
        .map_err(|e| CliError::core(p.path("truncation"), e))?;
    let norm = b.f.spectral_l2_norm(None).map_err(|e| CliError::core(p.path("density"), e))?;
    let s = sampling_bounds(&b.f, &lat, 2.0, 0.0, 1, norm).map_err(|e| CliError::core(p.path("truncation"), e))?;
    let mut r = CheckReport::limit("sampling_identity", s.raw_upper, (kappa / PI).sqrt(), tol);
    r.extras.push(("samples".into(), lat.len() as f64));
    Ok(CheckOutput {
        rows: vec![r],
        ..Default::default()
    })
}

struct Setup {
    zeta_extent: f64,
    x_extent: f64,
    subgrid: usize,
    terms: usize,
}

/// Product lattice at scale `d`: spacing `2d` on `E`, `2d²` on `F`.
fn product_lattice(ctx: &Context, p: &Params, s: &Setup, d: f64) -> CliResult<Lattice> {
    let (n, m) = (ctx.n(), ctx.m());
    let e = grid_points_e(n, 2.0 * d, s.zeta_extent);
    let f = grid_points_f(m, 2.0 * d * d, s.x_extent);
    let window = Window::symmetric(n, m, 2.0 * d, 2.0 * d * d);
    lattice_product(&ctx.scenario.spec, &e, &f, Metric::Gauge, &window, d / 8.0)
        .map_err(|e| CliError::core(p.path("delta"), e))
}

fn bounds(ctx: &Context, p: &Params, s: &Setup, lat: &Lattice, seed: u64) -> CliResult<(f64, f64, bool)> {
    let order = p.usize_or("quadrature_order", ctx.scenario.quadrature_order)?;
    let quad = ctx.quadrature(&ctx.scenario.body, order, &p.path("quadrature_order"))?;
    let d = DensitySpec::Random {
        seed: Some(seed),
        count: s.terms,
    };
    let f = ctx.synthesize(quad, &d, &p.path("seeds"))?.f;
    let norm = f.spectral_l2_norm(None).map_err(|e| CliError::core(p.path("density"), e))?;
    let b = sampling_bounds(&f, lat, 2.0, lat.r * lat.delta, s.subgrid, norm)
        .map_err(|e| CliError::core(p.path("subgrid"), e))?;
    Ok((b.lower_ratio, b.upper_ratio, b.subgrid_too_coarse))
}

fn nilpotent(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let base = ctx.require_seed(&p.path("seeds"))?;
    let s = Setup {
        zeta_extent: p.positive_or("zeta_extent", 4.0)?,
        x_extent: p.positive_or("x_extent", 20.0)?,
        subgrid: p.usize_or("subgrid", 3)?,
        terms: p.usize_or("random_terms", 3)?,
    };
    let mut rows = Vec::new();
    let mut plots = Vec::new();

    let seeds = p.usize_or("seeds", 20)?;
    if seeds > 0 {
        let d = p.positive_or("stability_delta", 0.3)?;
        let spread = p.positive_or("stability_tol", 0.2)?;
        let lat = product_lattice(ctx, p, &s, d)?;
        let mut uppers = Vec::with_capacity(seeds);
        let mut coarse = false;
        for i in 0..seeds as u64 {
            let (_, u, c) = bounds(ctx, p, &s, &lat, base.wrapping_add(i))?;
            uppers.push(u);
            coarse |= c;
        }
        let mut sorted = uppers.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let dev = uppers.iter().map(|u| (u / median - 1.0).abs()).fold(0.0, f64::max);
        let finite = uppers.iter().all(|u| u.is_finite() && *u > 0.0);
        let mut r = bound_row(format!("sampling_max[delta={}]", fmt_num(d)), if finite { dev } else { f64::INFINITY }, spread);
        r.extras.push(("median_upper".into(), median));
        r.extras.push(("min_upper".into(), sorted[0]));
        r.extras.push(("max_upper".into(), sorted[sorted.len() - 1]));
        r.extras.push(("realized_delta".into(), lat.delta));
        r.extras.push(("realized_r".into(), lat.r));
        if coarse {
            r.notes.push("sub-grid too coarse for some ball".into());
        }
        rows.push(r);
    }

    let mut sweep = p.f64s_or("delta", vec![0.4, 0.3, 0.2, 0.15])?;
    if !sweep.is_empty() {
        if sweep.iter().any(|d| !(*d > 0.0)) {
            return Err(CliError::validation(p.path("delta"), "scales must be positive"));
        }
        sweep.sort_by(|a, b| b.total_cmp(a));
        let mut points = Vec::with_capacity(sweep.len());
        for &d in &sweep {
            let lat = product_lattice(ctx, p, &s, d)?;
            let (lo, up, coarse) = bounds(ctx, p, &s, &lat, base)?;
            points.push((d, lo, up, coarse, lat.delta, lat.r));
        }
        let finest = &points[points.len().saturating_sub(2)..];
        let worst = finest
            .iter()
            .max_by(|a, b| (a.2 / a.1).total_cmp(&(b.2 / b.1)))
            .expect("non-empty sweep");
        let mut r = CheckReport::inequality("sampling_min", worst.2 / MIN_BOUND_SLACK, worst.1, 0.0);
        r.pass = finest.iter().all(|(_, lo, up, ..)| lo.is_finite() && *lo >= up / MIN_BOUND_SLACK);
        r.extras.push(("slack".into(), MIN_BOUND_SLACK));
        for (d, lo, up, _, _, _) in &points {
            r.extras.push((format!("lower_over_upper[delta={}]", fmt_num(*d)), lo / up));
        }
        r.series = points.iter().map(|(d, lo, up, ..)| (*d, lo / up)).collect();
        if points.iter().any(|x| x.3) {
            r.notes.push("sub-grid too coarse for some ball".into());
        }
        rows.push(r);
        plots.push(Plot {
            file: "sampling_sweep.dat".into(),
            columns: vec!["delta", "lower", "upper", "realized_delta", "realized_r"],
            rows: points.iter().map(|(d, lo, up, _, rd, rr)| vec![*d, *lo, *up, *rd, *rr]).collect(),
        });
    }
    Ok(CheckOutput {
        rows,
        plots,
        ..Default::default()
    })
}

pub fn wks(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let kappa = kappa(ctx, p)?;
    let truncation = p.usize_or("truncation", 2000)?;
    let tol = p.positive_or("tol", 1e-6)?;
    let default: Vec<f64> = (0..=80).map(|k| -10.0 + 0.25 * k as f64).collect();
    let points = match p.get("points") {
        Some(Value::Array(_)) => p.f64s_or("points", default)?,
        Some(_) => return Err(CliError::validation(p.path("points"), "expected an array of numbers")),
        None => default,
    };
    let b = ctx.function(p)?;
    let r = wks_reconstruct(&b.f, kappa, truncation, &points).map_err(|e| CliError::core(p.path("truncation"), e))?;
    let mut row = bound_row("wks".into(), r.max_error, tol);
    row.extras.push(("points".into(), points.len() as f64));
    Ok(CheckOutput {
        rows: vec![row],
        ..Default::default()
    })
}
