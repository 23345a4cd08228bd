use std::f64::consts::PI;

use bernstein_core::spectral::kernel_eval;
use bernstein_core::verify::check_kernel_reproducing;
use bernstein_core::{ComplexPoint, GroupElement, GroupPreset};
use num_complex::Complex64;

use super::{bound_row, CheckOutput, Context, Params, Plot};
use crate::error::{CliError, CliResult};

const CLOSED_FORM_TOL: f64 = 1e-10;

fn real_point(n: usize, m: usize, x: f64) -> ComplexPoint {
    let mut z = vec![Complex64::new(0.0, 0.0); m];
    z[0] = Complex64::new(x, 0.0);
    ComplexPoint::new(vec![Complex64::new(0.0, 0.0); n], z)
}

/// `[a, b]` when `K` is a one-dimensional interval.
fn interval(ctx: &Context) -> Option<(f64, f64)> {
    let k = &ctx.scenario.body;
    (k.dim() == 1 && k.vertices().is_some()).then(|| (-k.support(&[1.0]), k.support(&[-1.0])))
}

pub fn kernel(ctx: &Context, p: &Params) -> CliResult<CheckOutput> {
    let spec = &ctx.scenario.spec;
    let (n, m) = (spec.n(), spec.m());
    let b = ctx.function(p)?;
    let field = p.path("quadrature_order");
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let eval = |a: &ComplexPoint, c: &ComplexPoint| {
        kernel_eval(spec, &ctx.scenario.body, a, c, &b.quad).map_err(|e| CliError::core(&field, e))
    };

    match interval(ctx) {
        Some((a, c)) if n == 0 && m == 1 && (a + c).abs() < 1e-12 => {
            let kappa = c;
            let mut worst = 0.0_f64;
            for (x, y) in [(0.0, 0.0), (1.0, -0.5), (3.0, 0.25), (-2.5, 1.5)] {
                let t = kappa * (x - y);
                let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
                let k = eval(&real_point(0, 1, x), &real_point(0, 1, y))?;
                worst = worst.max((k - Complex64::new(kappa / PI * sinc, 0.0)).norm());
            }
            rows.push(bound_row("kernel_closed_form".into(), worst, CLOSED_FORM_TOL));
        }
        Some((a, c)) if *spec == GroupPreset::Heisenberg.spec() => {
            let o = real_point(1, 1, 0.0);
            let k = eval(&o, &o)?;
            let err = (k - Complex64::new((c * c - a * a) / (2.0 * PI * PI), 0.0)).norm();
            rows.push(bound_row("kernel_closed_form".into(), err, CLOSED_FORM_TOL));
        }
        _ => notes.push("no closed form for this group and body".to_string()),
    }

    let probe_count = p.usize_or("probes", 5)?;
    if probe_count > 0 {
        let grid = ctx.grid(p)?;
        let base = [(0.0, 0.0, 0.1), (0.3, -0.2, 0.4), (-0.5, 0.1, 0.2), (0.2, 0.25, -0.3), (0.0, 0.4, 0.0)];
        let probes: Vec<ComplexPoint> = (0..probe_count)
            .map(|i| {
                let (re, im, x) = base[i % base.len()];
                let shift = (i / base.len()) as f64 * 0.05;
                let mut zeta = vec![Complex64::new(0.0, 0.0); n];
                if let Some(z) = zeta.first_mut() {
                    *z = Complex64::new(re + shift, im);
                }
                let g = GroupElement::new(zeta, vec![x + shift; m]);
                ComplexPoint::embed(spec, &g, &vec![0.0; m])
            })
            .collect();
        let mut r = check_kernel_reproducing(&b.f, &b.quad, &probes, &grid).map_err(|e| CliError::core(p.path("grid"), e))?;
        r.name = "kernel_reproducing".into();
        rows.push(r);
    }
    if let Some(first) = rows.first_mut() {
        first.notes.extend(notes);
    }

    let extent = p.positive_or("slice_extent", 10.0)?;
    let points = p.usize_or("slice_points", 201)?.max(2);
    let origin = real_point(n, m, 0.0);
    let slice = (0..points)
        .map(|i| {
            let x = -extent + 2.0 * extent * i as f64 / (points - 1) as f64;
            let k = eval(&real_point(n, m, x), &origin)?;
            Ok(vec![x, k.re, k.im])
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CheckOutput {
        rows,
        plots: vec![Plot {
            file: "kernel_slice.dat".into(),
            columns: vec!["x", "re", "im"],
            rows: slice,
        }],
        ..Default::default()
    })
}
