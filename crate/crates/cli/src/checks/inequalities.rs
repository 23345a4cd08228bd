use std::collections::BTreeMap;

use bernstein_core::normcalc::{lp_norm, SlabGrid};
use bernstein_core::verify::{
    check_bernstein, check_embedding, check_plancherel_polya, check_real_pw, check_tangential_bernstein,
    estimate_spectrum, h_probe_set, CheckReport, NormRoute, GRID_TOL, SPECTRAL_TOL,
};
use bernstein_core::{ConvexBody, FPoly};
use num_complex::Complex64;
use serde_json::Value;

use super::{density_family, fmt_num, fmt_vec, renamed, unit_vectors, CheckOutput, Context, Params, Plot};
use crate::error::{CliError, CliResult};

/// Keeps the report with the larger ratio; non-finite ratios count as worst.
fn worse(acc: Option<CheckReport>, r: CheckReport) -> Option<CheckReport> {
    match acc {
        Some(a) if !a.ratio.is_finite() || (r.ratio.is_finite() && a.ratio >= r.ratio) => {
            let tail = match (a.tail_indicator, r.tail_indicator) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            };
            Some(CheckReport {
                tail_indicator: tail,
                ..a
            })
        }
        Some(a) => {
            let t = a.tail_indicator;
            let r = match t {
                Some(t) => r.with_tail(t),
                None => r,
            };
            Some(r)
        }
        None => Some(r),
    }
}

/// `spectral` for `p = 2` unless the check asks for the grid.
fn route<'g>(p: &Params, exponent: f64, grid: Option<&'g SlabGrid>) -> CliResult<NormRoute<'g>> {
    let wanted = p.str_opt("route")?;
    match (wanted, exponent == 2.0) {
        (Some("grid"), _) | (None, false) => grid
            .map(NormRoute::Grid)
            .ok_or_else(|| CliError::validation(p.path("grid"), "grid route needs a grid")),
        (Some("spectral"), true) | (None, true) => Ok(NormRoute::Spectral),
        (Some("spectral"), false) => Err(CliError::validation(p.path("route"), "spectral route needs p = 2")),
        (Some(other), _) => Err(CliError::validation(p.path("route"), format!("unknown route `{other}`"))),
    }
}

fn needs_grid(p: &Params, ps: &[f64]) -> CliResult<bool> {
    Ok(p.str_opt("route")? == Some("grid") || ps.iter().any(|x| *x != 2.0))
}

fn symmetric_hull(k: &ConvexBody) -> CliResult<ConvexBody> {
    if k.is_symmetric() {
        return Ok(k.clone());
    }
    let hull = match k.as_polytope() {
        Some(poly) => {
            let v = poly.vertices().unwrap_or_default();
            let mut pts = v.to_vec();
            pts.extend(v.iter().map(|x| x.iter().map(|c| -c).collect::<Vec<_>>()));
            ConvexBody::polytope(pts)
        }
        None => {
            let r = k.center().iter().map(|c| c * c).sum::<f64>().sqrt() + k.diameter();
            ConvexBody::ball(vec![0.0; k.dim()], r)
        }
    };
    hull.map_err(|e| CliError::core("K", e))
}

pub fn plancherel(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let b = ctx.function(p)?;
    let grid = ctx.grid(p)?;
    let zero = vec![0.0; ctx.m()];
    let g = lp_norm(&b.f, &zero, 2.0, &grid).map_err(|e| CliError::core(p.path("grid"), e))?;
    let spectral = b
        .f
        .spectral_l2_norm(None)
        .map_err(|e| CliError::core(p.path("density"), e))?
        .powi(2);
    let target = match p.get("expected") {
        Some(_) => p.f64_or("expected", 0.0)?,
        None => spectral,
    };
    let tol = p.positive_or("tol", 0.01)?;
    let mut r = CheckReport::limit("plancherel", g.value * g.value, target, tol).with_tail(g.tail_indicator);
    r.extras.push(("spectral_norm_squared".into(), spectral));
    Ok(CheckOutput {
        rows: vec![r],
        ..Default::default()
    })
}

pub fn pp(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    let ps = p.f64s_or("p", vec![2.0])?;
    let hs = p.vectors_or("h", m, h_probe_set(m))?;
    let body = &ctx.scenario.body;
    let order = p.usize_or("quadrature_order", ctx.scenario.quadrature_order)?;
    let quad = ctx.quadrature(body, order, &p.path("quadrature_order"))?;
    let fs = density_family(ctx, p)?
        .iter()
        .map(|d| ctx.synthesize(quad.clone(), d, &p.path("density")).map(|b| b.f))
        .collect::<CliResult<Vec<_>>>()?;
    let grid = if needs_grid(p, &ps)? { Some(ctx.grid(p)?) } else { None };
    let mut rows = Vec::new();
    for &exp in &ps {
        let rt = route(p, exp, grid.as_ref())?;
        for h in &hs {
            let mut acc = None;
            for f in &fs {
                let r = check_plancherel_polya(f, body, h, exp, rt).map_err(|e| CliError::core(p.path("h"), e))?;
                acc = worse(acc, r);
            }
            let mut r = acc.expect("at least one density");
            r.notes.push(format!("worst of {} densities", fs.len()));
            rows.push(renamed(r, format!("pp[p={};h={}]", fmt_num(exp), fmt_vec(h))));
        }
    }
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}

pub fn bernstein(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    let ps = p.f64s_or("p", vec![2.0])?;
    let vs = p.vectors_or("v", m, unit_vectors(m))?;
    let body = &ctx.scenario.body;
    let hull = symmetric_hull(body)?;
    let order = p.usize_or("quadrature_order", ctx.scenario.quadrature_order)?;
    let quad = ctx.quadrature(body, order, &p.path("quadrature_order"))?;
    let fs = density_family(ctx, p)?
        .iter()
        .map(|d| ctx.synthesize(quad.clone(), d, &p.path("density")).map(|b| b.f))
        .collect::<CliResult<Vec<_>>>()?;
    let grid = if needs_grid(p, &ps)? { Some(ctx.grid(p)?) } else { None };
    let mut rows = Vec::new();
    for &exp in &ps {
        let rt = route(p, exp, grid.as_ref())?;
        for v in &vs {
            let mut acc = None;
            for f in &fs {
                let r = check_bernstein(f, &hull, v, exp, rt).map_err(|e| CliError::core(p.path("v"), e))?;
                acc = worse(acc, r);
            }
            let mut r = acc.expect("at least one density");
            if !body.is_symmetric() {
                r.notes.push("bound taken over the symmetric hull of K".into());
            }
            rows.push(renamed(r, format!("bernstein[p={};v={}]", fmt_num(exp), fmt_vec(v))));
        }
    }
    if p.get("saturation_density").is_some() {
        let d = p.density("saturation_density")?;
        let order = p.usize_or("saturation_order", order)?;
        let min = p.positive_or("saturation_min", 0.95)?;
        let quad = ctx.quadrature(body, order, &p.path("saturation_order"))?;
        let f = ctx.synthesize(quad, &d, &p.path("saturation_density"))?.f;
        let v = vs.first().cloned().unwrap_or_else(|| vec![1.0; m]);
        let achieved = check_bernstein(&f, &hull, &v, 2.0, NormRoute::Spectral)
            .map_err(|e| CliError::core(p.path("saturation_density"), e))?;
        let mut r = CheckReport::inequality("bernstein_saturation", min, achieved.ratio, 0.0);
        r.pass &= achieved.pass;
        r.extras.push(("achieved_ratio".into(), achieved.ratio));
        rows.push(r);
    }
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}

/// `⟨v, λ⟩^power` expanded into monomials.
fn linear_power(v: &[f64], power: u32) -> FPoly {
    let m = v.len();
    let mut terms: BTreeMap<Vec<u32>, f64> = BTreeMap::from([(vec![0; m], 1.0)]);
    for _ in 0..power {
        let mut next = BTreeMap::new();
        for (e, c) in &terms {
            for (j, vj) in v.iter().enumerate().filter(|(_, vj)| **vj != 0.0) {
                let mut e2 = e.clone();
                e2[j] += 1;
                *next.entry(e2).or_insert(0.0) += c * vj;
            }
        }
        terms = next;
    }
    FPoly::from_terms(
        m,
        terms.into_iter().map(|(e, c)| (e, Complex64::new(c, 0.0))).collect(),
    )
}

pub fn real_pw(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    let power = p.usize_or("power", 1)? as u32;
    let v = p
        .vectors_or("direction", m, vec![unit_vectors(m)[0].clone()])?
        .remove(0);
    let k_max = p.usize_or("k_max", 20)? as u32;
    let tol = p.positive_or("tol", 0.02)?;
    let b = ctx.function(p)?;
    let poly = linear_power(&v, power);
    let r = check_real_pw(&b.f, &poly, k_max, tol).map_err(|e| CliError::core(p.path("k_max"), e))?;
    let plot = Plot {
        file: "real_pw.dat".into(),
        columns: vec!["k", "a_k"],
        rows: r.series.iter().map(|(k, a)| vec![*k, *a]).collect(),
    };
    let r = renamed(r, format!("real_pw[power={power};v={}]", fmt_vec(&v)));
    Ok(CheckOutput {
        rows: vec![r],
        plots: vec![plot],
        ..Default::default()
    })
}

pub fn tangential(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let n = ctx.n();
    let ks = p.f64s_or("k", vec![1.0, 2.0, 3.0, 4.0, 5.0])?;
    let mut e1 = vec![Complex64::new(0.0, 0.0); n];
    if let Some(z) = e1.first_mut() {
        *z = Complex64::new(1.0, 0.0);
    }
    let v = p.complex_vector_or("v", n, e1)?;
    let use_grid = match p.get("grid") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => true,
    };
    let b = ctx.function(p)?;
    let grid = if use_grid { Some(ctx.grid(p)?) } else { None };
    let body = &ctx.scenario.body;
    let mut rows = Vec::new();
    for &k in &ks {
        if k < 0.0 || k.fract() != 0.0 {
            return Err(CliError::validation(p.path("k"), "orders are non-negative integers"));
        }
        let k = k as usize;
        let r = check_tangential_bernstein(&b.f, body, &v, k, grid.as_ref())
            .map_err(|e| CliError::core(p.path("v"), e))?;
        if grid.is_some() {
            let spectral = r
                .extras
                .iter()
                .find(|(n, _)| n == "spectral_lhs")
                .map(|(_, x)| *x)
                .unwrap_or(f64::NAN);
            let mut a = CheckReport::limit(&format!("tangential_agreement[k={k}]"), r.lhs, spectral, GRID_TOL);
            if let Some(t) = r.tail_indicator {
                a = a.with_tail(t);
            }
            rows.push(renamed(r, format!("tangential[k={k};grid]")));
            rows.push(a);
        } else {
            rows.push(renamed(r, format!("tangential[k={k}]")));
        }
    }
    if p.get("closed_form_ratio2").is_some() {
        let expected = p.f64_or("closed_form_ratio2", 0.0)?;
        let r = check_tangential_bernstein(&b.f, body, &v, 1, None).map_err(|e| CliError::core(p.path("v"), e))?;
        rows.push(CheckReport::limit("tangential_closed_form", r.ratio * r.ratio, expected, 0.01));
    }
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}

pub fn embedding(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    let pairs = p.vectors_or("pairs", 2, vec![vec![2.0, 4.0], vec![1.0, 2.0]])?;
    let probes = p.vectors_or("h", m, h_probe_set(m))?;
    let b = ctx.function(p)?;
    let grid = ctx.grid(p)?;
    let mut rows = Vec::new();
    for pq in &pairs {
        let r = check_embedding(&b.f, &ctx.scenario.body, pq[0], pq[1], &probes, &grid)
            .map_err(|e| CliError::core(p.path("pairs"), e))?;
        rows.push(renamed(r, format!("embedding[p={};q={}]", fmt_num(pq[0]), fmt_num(pq[1]))));
    }
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}

pub fn spectrum(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let m = ctx.m();
    let mut dirs = unit_vectors(m);
    dirs.extend(unit_vectors(m).into_iter().map(|v| v.iter().map(|x| -x).collect()));
    let dirs = p.vectors_or("directions", m, dirs)?;
    let k_max = p.usize_or("k_max", 30)? as u32;
    let b = ctx.function(p)?;
    let est = estimate_spectrum(&b.f, &dirs, k_max).map_err(|e| CliError::core(p.path("directions"), e))?;
    let rows = est
        .iter()
        .map(|e| {
            let mut r = CheckReport::inequality(
                &format!("spectrum[v={}]", fmt_vec(&e.direction)),
                e.estimate,
                e.max_modulus,
                SPECTRAL_TOL,
            );
            r.extras.push(("support_value".into(), e.support_value));
            r.extras.push(("relative_gap".into(), 1.0 - e.estimate / e.max_modulus));
            r
        })
        .collect();
    Ok(CheckOutput {
        rows,
        ..Default::default()
    })
}
