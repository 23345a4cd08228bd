//! Executable inequality and limit checks with structured reports.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexgeom::ConvexBody;
use crate::crgroup::{random_element, ComplexPoint, GroupElement, GroupSpec};
use crate::error::{Error, Result};
use crate::normcalc::{grid_inner, lp_norm, SlabGrid};
use crate::spectral::function::factorial;
use crate::spectral::{BandlimitedFunction, FPoly, Quadrature};
use crate::vecops::norm;

/// Relative tolerance for spectral-route inequalities.
pub const SPECTRAL_TOL: f64 = 1e-3;
/// Relative tolerance once a grid norm enters.
pub const GRID_TOL: f64 = 2e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub scenario: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub tail_indicator: Option<f64>,
    /// `(k, a_k)`-style series for limit checks.
    pub series: Vec<(f64, f64)>,
    /// Named auxiliary values (cross-checks, unasserted variants).
    pub extras: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl CheckReport {
    /// `pass ⇔ lhs / rhs ≤ 1 + tol`; `0 / 0` counts as ratio 0.
    pub fn inequality(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self {
            name: name.into(),
            scenario: String::new(),
            lhs,
            rhs,
            ratio,
            tolerance,
            pass: ratio.is_finite() && ratio <= 1.0 + tolerance,
            tail_indicator: None,
            series: Vec::new(),
            extras: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// `pass ⇔ |estimate - target| ≤ tol · |target|`.
    pub fn limit(name: &str, estimate: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            scenario: String::new(),
            lhs: estimate,
            rhs: target,
            ratio: if target == 0.0 { estimate } else { estimate / target },
            tolerance,
            pass: (estimate - target).abs() <= tolerance * target.abs(),
            tail_indicator: None,
            series: Vec::new(),
            extras: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_scenario(mut self, id: &str) -> Self {
        self.scenario = id.into();
        self
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail_indicator = Some(self.tail_indicator.map_or(tail, |t| t.max(tail)));
        self
    }
}

/// How an `L^p` norm is obtained.
#[derive(Debug, Clone, Copy)]
pub enum NormRoute<'a> {
    /// Plancherel sum; `p = 2` and prefactor-free functions only.
    Spectral,
    Grid(&'a SlabGrid),
}

impl NormRoute<'_> {
    fn tolerance(&self) -> f64 {
        match self {
            NormRoute::Spectral => SPECTRAL_TOL,
            NormRoute::Grid(_) => GRID_TOL,
        }
    }
}

/// `‖f_h‖₂` from the Plancherel sum with the `e^{-⟨μ, h⟩}` damping.
pub fn spectral_slice_norm(f: &BandlimitedFunction, h: &[f64]) -> Result<f64> {
    if !f.is_prefactor_free() {
        return Err(Error::PrefactorPresent);
    }
    let c = f.norm_constant();
    let mut total = 0.0;
    for t in f.terms() {
        let a2 = t.coef.norm_sqr();
        if a2 == 0.0 {
            continue;
        }
        let damp: f64 = t.mu.iter().zip(h).map(|(m, hh)| m * hh).sum();
        let pf = f.spec().pfaffian_abs(&t.mu).value.abs();
        total += a2 * (-2.0 * damp).exp() / (c * t.weight * pf);
    }
    Ok(total.sqrt())
}

fn route_norm(f: &BandlimitedFunction, h: &[f64], p: f64, route: NormRoute) -> Result<(f64, Option<f64>)> {
    match route {
        NormRoute::Spectral => {
            if p != 2.0 {
                return Err(Error::InvalidArgument("spectral norms exist for p = 2 only".into()));
            }
            Ok((spectral_slice_norm(f, h)?, None))
        }
        NormRoute::Grid(grid) => {
            let r = lp_norm(f, h, p, grid)?;
            Ok((r.value, Some(r.tail_indicator)))
        }
    }
}

fn attach_tail(mut r: CheckReport, tails: &[Option<f64>]) -> CheckReport {
    for t in tails.iter().flatten() {
        r = r.with_tail(*t);
    }
    r
}

/// `‖f_h‖_p ≤ e^{H_K(h)} ‖f_0‖_p`.
pub fn check_plancherel_polya(
    f: &BandlimitedFunction,
    k: &ConvexBody,
    h: &[f64],
    p: f64,
    route: NormRoute,
) -> Result<CheckReport> {
    let hk = k.support_function(h)?;
    let zero = vec![0.0; h.len()];
    let (lhs, t1) = route_norm(f, h, p, route)?;
    let (base, t0) = route_norm(f, &zero, p, route)?;
    let r = CheckReport::inequality("plancherel_polya", lhs, hk.exp() * base, route.tolerance());
    Ok(attach_tail(r, &[t0, t1]))
}

fn ensure_symmetric(k: &ConvexBody) -> Result<()> {
    if k.is_symmetric() {
        Ok(())
    } else {
        Err(Error::NonSymmetricBody)
    }
}

/// `‖∂_{v_1} ⋯ ∂_{v_k} f‖_p ≤ Π H_K(v_j) ‖f‖_p` for symmetric `K`.
pub fn check_bernstein_iterated(
    f: &BandlimitedFunction,
    k: &ConvexBody,
    vs: &[Vec<f64>],
    p: f64,
    route: NormRoute,
) -> Result<CheckReport> {
    ensure_symmetric(k)?;
    let mut d = f.clone();
    let mut bound = 1.0;
    for v in vs {
        bound *= k.support_function(v)?;
        d = d.apply_poly_derivative(&FPoly::directional(v), 1);
    }
    let zero = vec![0.0; k.dim()];
    if vs.iter().any(|v| norm(v) == 0.0) {
        return Ok(CheckReport::inequality("bernstein", 0.0, 0.0, route.tolerance()));
    }
    let (lhs, t1) = route_norm(&d, &zero, p, route)?;
    let (base, t0) = route_norm(f, &zero, p, route)?;
    let r = CheckReport::inequality("bernstein", lhs, bound * base, route.tolerance());
    Ok(attach_tail(r, &[t0, t1]))
}

pub fn check_bernstein(
    f: &BandlimitedFunction,
    k: &ConvexBody,
    v: &[f64],
    p: f64,
    route: NormRoute,
) -> Result<CheckReport> {
    check_bernstein_iterated(f, k, &[v.to_vec()], p, route)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `log ‖P(-i∂_F)^k f‖₂²` on the spectral route.
fn log_poly_power_norm2(f: &BandlimitedFunction, p: &FPoly, k: u32) -> Result<f64> {
    if !f.is_prefactor_free() {
        return Err(Error::PrefactorPresent);
    }
    let c = f.norm_constant();
    let logs: Vec<f64> = f
        .terms()
        .iter()
        .filter(|t| t.coef != Complex64::new(0.0, 0.0))
        .map(|t| {
            let pf = f.spec().pfaffian_abs(&t.mu).value.abs();
            t.coef.norm_sqr().ln() - (c * t.weight * pf).ln() + 2.0 * k as f64 * p.eval(&t.mu).norm().ln()
        })
        .collect();
    Ok(log_sum_exp(&logs))
}

/// `a_k = (‖P(-i∂_F)^k f‖₂ / ‖f‖₂)^{1/k}`, `k = 1..=k_max`, in log domain.
pub fn real_pw_series(f: &BandlimitedFunction, p: &FPoly, k_max: u32) -> Result<Vec<f64>> {
    let base = log_poly_power_norm2(f, p, 0)?;
    (1..=k_max)
        .map(|k| Ok(((log_poly_power_norm2(f, p, k)? - base) / (2.0 * k as f64)).exp()))
        .collect()
}

/// Real Paley–Wiener limit: `a_{k_max}` against `max |P|` over the spectrum nodes.
pub fn check_real_pw(f: &BandlimitedFunction, p: &FPoly, k_max: u32, tolerance: f64) -> Result<CheckReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be positive".into()));
    }
    let series = real_pw_series(f, p, k_max)?;
    let target = f
        .terms()
        .iter()
        .filter(|t| t.coef != Complex64::new(0.0, 0.0))
        .map(|t| p.eval(&t.mu).norm())
        .fold(0.0_f64, f64::max);
    let est = *series.last().unwrap_or(&0.0);
    let mut r = CheckReport::limit("real_pw", est, target, tolerance);
    r.series = series
        .iter()
        .enumerate()
        .map(|(i, a)| ((i + 1) as f64, *a))
        .collect();
    let monotone = series.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    r.extras.push(("monotone".into(), if monotone { 1.0 } else { 0.0 }));
    Ok(r)
}

/// `sup_{λ ∈ K} Φ_λ(v, v)`, linear in `λ`.
fn sup_form(f: &BandlimitedFunction, k: &ConvexBody, v: &[Complex64]) -> f64 {
    let phi_v = f.spec().phi(v);
    let neg: Vec<f64> = phi_v.iter().map(|x| -x).collect();
    k.support(&neg)
}

/// `‖Z_v^k f‖₂ ≤ 2^{k/2} sup_K ‖v^k‖_{S^k(E, Φ_λ)} ‖f‖₂`.
pub fn check_tangential_bernstein(
    f: &BandlimitedFunction,
    k_body: &ConvexBody,
    v: &[Complex64],
    k: usize,
    grid: Option<&SlabGrid>,
) -> Result<CheckReport> {
    let spec = f.spec();
    if spec.n() == 0 {
        return Err(Error::NoComplexDirections);
    }
    for (index, t) in f.terms().iter().enumerate() {
        if !spec.in_phi_polar(&t.mu, 1e-10 * (1.0 + norm(&t.mu))) {
            return Err(Error::NodeOutsideCone { index });
        }
    }
    let spectral_lhs = f.spectral_l2_norm(Some((v, k)))?;
    let base = f.spectral_l2_norm(None)?;
    let sup = sup_form(f, k_body, v).max(0.0);
    let rhs = 2f64.powf(k as f64 / 2.0) * (factorial(k) * sup.powi(k as i32)).sqrt() * base;
    let mut tail = None;
    let (lhs, tol) = match grid {
        Some(g) => {
            let mut z = f.clone();
            for _ in 0..k {
                z = z.apply_z(v, false)?;
            }
            let r = lp_norm(&z, &vec![0.0; spec.m()], 2.0, g)?;
            tail = Some(r.tail_indicator);
            (r.value, GRID_TOL)
        }
        None => (spectral_lhs, SPECTRAL_TOL),
    };
    let mut r = CheckReport::inequality("tangential", lhs, rhs, tol);
    if let Some(t) = tail {
        r = r.with_tail(t);
    }
    r.extras.push(("spectral_lhs".into(), spectral_lhs));
    if lhs > 0.0 {
        r.extras.push(("grid_vs_spectral".into(), lhs / spectral_lhs));
    }
    // The |H_K(Φ(v))| variant, reported without assertion.
    let hk = k_body.support(&spec.phi(v)).abs();
    let variant = 2f64.powf(k as f64 / 2.0) * (factorial(k) * hk.powi(k as i32)).sqrt() * base;
    r.extras.push(("abs_hk_variant_rhs".into(), variant));
    Ok(r)
}

/// `sup_h |h|^{1/p - 1/q} ‖f_h‖_q / (e^{H_K(h)} ‖f_0‖_p)` over the probes.
pub fn check_embedding(
    f: &BandlimitedFunction,
    k: &ConvexBody,
    p: f64,
    q: f64,
    probes: &[Vec<f64>],
    grid: &SlabGrid,
) -> Result<CheckReport> {
    if !(p > 0.0 && p <= q) {
        return Err(Error::InvalidArgument(format!("need 0 < p ≤ q, got p={p}, q={q}")));
    }
    let zero = vec![0.0; k.dim()];
    let base = lp_norm(f, &zero, p, grid)?;
    let expo = 1.0 / p - if q.is_infinite() { 0.0 } else { 1.0 / q };
    let mut worst = 0.0_f64;
    let mut tail = base.tail_indicator;
    let mut series = Vec::new();
    for h in probes {
        let r = lp_norm(f, h, q, grid)?;
        tail = tail.max(r.tail_indicator);
        let v = if base.value == 0.0 {
            0.0
        } else {
            norm(h).powf(expo) * r.value / (k.support_function(h)?.exp() * base.value)
        };
        series.push((norm(h), v));
        worst = worst.max(v);
    }
    let mut r = CheckReport::limit("embedding", worst, worst, 0.0);
    r.pass = worst.is_finite();
    r.ratio = worst;
    r.series = series;
    Ok(r.with_tail(tail))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub direction: Vec<f64>,
    /// `(‖∂_v^k f‖₂ / ‖f‖₂)^{1/k}` at `k = k_max`.
    pub estimate: f64,
    pub support_value: f64,
    /// `max_{λ ∈ K} |⟨λ, v⟩|`.
    pub max_modulus: f64,
}

pub fn estimate_spectrum(
    f: &BandlimitedFunction,
    directions: &[Vec<f64>],
    k_max: u32,
) -> Result<Vec<SpectrumEstimate>> {
    directions
        .iter()
        .map(|v| {
            let series = real_pw_series(f, &FPoly::directional(v), k_max)?;
            Ok(SpectrumEstimate {
                direction: v.clone(),
                estimate: *series.last().unwrap_or(&0.0),
                support_value: f.body().support_function(v)?,
                max_modulus: f.body().max_abs_pairing(v),
            })
        })
        .collect()
}

/// `{±e_j, ±0.5 e_j}` plus the mixed probes `±(1, …, 1)` and `(1, -1, …)`.
pub fn h_probe_set(m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for j in 0..m {
        for s in [1.0, -1.0, 0.5, -0.5] {
            let mut h = vec![0.0; m];
            h[j] = s;
            out.push(h);
        }
    }
    if m > 1 {
        out.push(vec![0.5; m]);
        out.push(vec![-0.5; m]);
        out.push((0..m).map(|j| if j % 2 == 0 { 0.5 } else { -0.5 }).collect());
    }
    out
}

/// Associativity, inverse, dilation automorphism and gauge homogeneity on
/// `probes` seeded random triples; `lhs` is the worst relative defect.
pub fn check_group_invariants(spec: &GroupSpec, probes: usize, seed: u64, tolerance: f64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rel = |a: &GroupElement, b: &GroupElement| {
        let (ca, cb) = (a.coords(), b.coords());
        ca.iter()
            .zip(&cb)
            .map(|(x, y)| (x - y).abs() / (1.0 + x.abs().max(y.abs())))
            .fold(0.0, f64::max)
    };
    let mut worst = [0.0_f64; 4];
    for _ in 0..probes {
        let g = random_element(spec, &mut rng, 2.0);
        let h = random_element(spec, &mut rng, 2.0);
        let k = random_element(spec, &mut rng, 2.0);
        let t = rng.random_range(0.1..4.0);
        let left = spec.multiply(&spec.multiply(&g, &h)?, &k)?;
        let right = spec.multiply(&g, &spec.multiply(&h, &k)?)?;
        worst[0] = worst[0].max(rel(&left, &right));
        let e = spec.multiply(&g, &spec.inverse(&g))?;
        let e2 = spec.multiply(&spec.inverse(&g), &g)?;
        worst[1] = worst[1].max(rel(&e, &spec.identity())).max(rel(&e2, &spec.identity()));
        let a = spec.dilate(t, &spec.multiply(&g, &h)?)?;
        let b = spec.multiply(&spec.dilate(t, &g)?, &spec.dilate(t, &h)?)?;
        worst[2] = worst[2].max(rel(&a, &b));
        let lhs = spec.gauge(&spec.dilate(t, &g)?);
        let rhs = t * spec.gauge(&g);
        worst[3] = worst[3].max((lhs - rhs).abs() / (1.0 + rhs));
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    let mut r = CheckReport::limit("group", max, 0.0, 0.0);
    r.rhs = tolerance;
    r.ratio = max / tolerance;
    r.pass = max <= tolerance;
    for (name, v) in ["associativity", "inverse", "dilation", "homogeneity"].iter().zip(worst) {
        r.extras.push(((*name).into(), v));
    }
    Ok(r)
}

/// Translation, ball-sum and Minkowski additivity identities of `H_K` on
/// `probes` seeded directions; `lhs` is the worst absolute defect.
pub fn check_support_identities(k: &ConvexBody, probes: usize, seed: u64, tolerance: f64) -> Result<CheckReport> {
    let dim = k.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let centre: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let radius = rng.random_range(0.1..2.0);
    let moved = k.translate(&shift)?;
    let ball = ConvexBody::ball(centre.clone(), radius)?;
    let with_ball = k.minkowski_sum(&ball)?;
    let other = ConvexBody::polytope(
        (0..dim + 1)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect(),
    )?;
    let sum = k.minkowski_sum(&other)?;
    let explicit = sum.as_polytope();
    let mut worst = [0.0_f64; 3];
    for _ in 0..probes {
        let h: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let hk = k.support_function(&h)?;
        let dot = |a: &[f64]| a.iter().zip(&h).map(|(x, y)| x * y).sum::<f64>();
        worst[0] = worst[0].max((moved.support_function(&h)? - (hk - dot(&shift))).abs());
        let expect = hk - dot(&centre) + radius * norm(&h);
        worst[1] = worst[1].max((with_ball.support_function(&h)? - expect).abs());
        let parts = hk + other.support_function(&h)?;
        worst[2] = worst[2].max((sum.support_function(&h)? - parts).abs());
        if let Some(p) = &explicit {
            worst[2] = worst[2].max((p.support_function(&h)? - parts).abs());
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    let mut r = CheckReport::limit("support", max, 0.0, 0.0);
    r.rhs = tolerance;
    r.ratio = max / tolerance;
    r.pass = max <= tolerance;
    for (name, v) in ["translate", "ball_sum", "minkowski"].iter().zip(worst) {
        r.extras.push(((*name).into(), v));
    }
    Ok(r)
}

/// Reproducing property `⟨f_0, K(·, w)_0⟩ = f(w)` on the grid; `lhs` is the
/// worst relative error over the probe points.
pub fn check_kernel_reproducing(
    f: &BandlimitedFunction,
    quad: &Quadrature,
    probes: &[ComplexPoint],
    grid: &SlabGrid,
) -> Result<CheckReport> {
    if probes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let h = vec![0.0; f.spec().m()];
    let mut worst = 0.0_f64;
    let mut tail = 0.0_f64;
    let mut series = Vec::with_capacity(probes.len());
    for (i, w) in probes.iter().enumerate() {
        let k = BandlimitedFunction::kernel_section(f.spec(), quad, w)?;
        let inner = grid_inner(f, &k, &h, grid);
        let direct = f.evaluate(w);
        let err = (inner - direct).norm() / direct.norm().max(1e-300);
        tail = tail.max(lp_norm(&k, &h, 2.0, grid)?.tail_indicator);
        series.push((i as f64, err));
        worst = worst.max(err);
    }
    let mut r = CheckReport::inequality("kernel", worst, GRID_TOL, 0.0);
    r.tolerance = GRID_TOL;
    r.series = series;
    Ok(r.with_tail(tail))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::normcalc::build_slab_grid;
    use crate::presets::GroupPreset;
    use crate::spectral::{build_quadrature, DensitySpec};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn synth(preset: GroupPreset, body: &ConvexBody, order: usize, d: DensitySpec) -> BandlimitedFunction {
        let q = Arc::new(build_quadrature(body, order).unwrap());
        BandlimitedFunction::synthesize(&preset.spec(), &d.build(q, Some(1)).unwrap()).unwrap()
    }

    fn sinc_body() -> ConvexBody {
        ConvexBody::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn plancherel_polya_examples() {
        let k = sinc_body();
        let f = synth(GroupPreset::Abelian1d, &k, 64, DensitySpec::Constant(c(1.0)));
        let r = check_plancherel_polya(&f, &k, &[0.0], 2.0, NormRoute::Spectral).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-14 && r.pass);
        let r = check_plancherel_polya(&f, &k, &[1.0], 2.0, NormRoute::Spectral).unwrap();
        let expect = ((2f64).sinh() / (2.0 * PI)).sqrt() / (1.0 / PI).sqrt() / 1f64.exp();
        assert!((r.ratio - expect).abs() < 1e-10, "{}", r.ratio);
        assert!((r.ratio - 0.49).abs() < 0.01);

        let hk = ConvexBody::interval(1.0, 2.0).unwrap();
        let f = synth(
            GroupPreset::Heisenberg,
            &hk,
            32,
            DensitySpec::GaussianBump {
                center: vec![1.5],
                width: 0.2,
            },
        );
        let r = check_plancherel_polya(&f, &hk, &[-0.5], 2.0, NormRoute::Spectral).unwrap();
        assert!(r.pass && r.ratio < 1.0);
    }

    #[test]
    fn bernstein_examples() {
        let k = sinc_body();
        let f = synth(GroupPreset::Abelian1d, &k, 64, DensitySpec::Constant(c(1.0)));
        let r = check_bernstein(&f, &k, &[1.0], 2.0, NormRoute::Spectral).unwrap();
        assert!((r.ratio - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let spike = synth(
            GroupPreset::Abelian1d,
            &k,
            128,
            DensitySpec::EndpointSpike { sharpness: 50.0 },
        );
        let r = check_bernstein(&spike, &k, &[1.0], 2.0, NormRoute::Spectral).unwrap();
        assert!(r.pass && r.ratio >= 0.95, "{}", r.ratio);
        let r = check_bernstein(&f, &k, &[0.0], 2.0, NormRoute::Spectral).unwrap();
        assert!(r.pass && r.ratio == 0.0);
        let asym = ConvexBody::interval(1.0, 2.0).unwrap();
        let g = synth(GroupPreset::Abelian1d, &asym, 8, DensitySpec::Constant(c(1.0)));
        assert_eq!(
            check_bernstein(&g, &asym, &[1.0], 2.0, NormRoute::Spectral),
            Err(Error::NonSymmetricBody)
        );
    }

    #[test]
    fn real_pw_series_values() {
        let hk = ConvexBody::interval(1.0, 2.0).unwrap();
        let f = synth(GroupPreset::Heisenberg, &hk, 48, DensitySpec::Constant(c(1.0)));
        let p = FPoly::linear(&[1.0], c(1.0));
        let s = real_pw_series(&f, &p, 20).unwrap();
        // a_k^{2k} = ∫λ^{2k+1} / ∫λ.
        for (i, a) in s.iter().enumerate() {
            let k = (i + 1) as f64;
            let exact = ((2f64.powf(2.0 * k + 2.0) - 1.0) / (2.0 * k + 2.0) / 1.5).powf(1.0 / (2.0 * k));
            assert!((a - exact).abs() < 1e-10, "k={k}");
        }
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        let r = check_real_pw(&f, &p, 20, 0.02).unwrap();
        assert_eq!(r.extras[0].1, 1.0);
        assert!((r.lhs - ((2f64.powi(42) - 1.0) / 63.0).powf(1.0 / 40.0)).abs() < 1e-10);
        assert!(!r.pass);

        let cst = check_real_pw(&f, &FPoly::constant(1, c(-3.0)), 5, 1e-12).unwrap();
        assert!(cst.pass);
        assert!(cst.series.iter().all(|(_, a)| (a - 3.0).abs() < 1e-12));
    }

    #[test]
    fn tangential_closed_forms() {
        let hk = ConvexBody::interval(1.0, 2.0).unwrap();
        let f = synth(GroupPreset::Heisenberg, &hk, 32, DensitySpec::Constant(c(1.0)));
        let v = [c(1.0)];
        let r = check_tangential_bernstein(&f, &hk, &v, 1, None).unwrap();
        assert!((r.lhs.powi(2) - 14.0 / (3.0 * PI * PI)).abs() < 1e-12);
        assert!((r.rhs.powi(2) - 6.0 / (PI * PI)).abs() < 1e-12);
        assert!((r.ratio.powi(2) - 7.0 / 9.0).abs() < 1e-12);
        let r0 = check_tangential_bernstein(&f, &hk, &v, 0, None).unwrap();
        assert!((r0.ratio - 1.0).abs() < 1e-14 && r0.pass);
        let ab = synth(GroupPreset::Abelian1d, &sinc_body(), 4, DensitySpec::Constant(c(1.0)));
        assert_eq!(
            check_tangential_bernstein(&ab, &sinc_body(), &[], 1, None),
            Err(Error::NoComplexDirections)
        );
    }

    #[test]
    fn embedding_reduces_to_pp() {
        let k = sinc_body();
        let f = synth(GroupPreset::Abelian1d, &k, 512, DensitySpec::Constant(c(1.0)));
        let grid = build_slab_grid(&GroupPreset::Abelian1d.spec(), 1.0, 400.0, 1, 1600, None).unwrap();
        let r = check_embedding(&f, &k, 2.0, 2.0, &[vec![1.0], vec![-0.5]], &grid).unwrap();
        assert!(r.pass && r.lhs <= 1.0 + GRID_TOL);
        let z = check_embedding(&f.zeroed(), &k, 2.0, 4.0, &[vec![1.0]], &grid).unwrap();
        assert_eq!(z.lhs, 0.0);
    }

    #[test]
    fn spectrum_estimates() {
        let k = sinc_body();
        let f = synth(GroupPreset::Abelian1d, &k, 64, DensitySpec::Constant(c(1.0)));
        let e = estimate_spectrum(&f, &[vec![1.0]], 30).unwrap();
        // (1 / 61)^{1/60}.
        assert!((e[0].estimate - 61f64.powf(-1.0 / 60.0)).abs() < 1e-10);
        let e = estimate_spectrum(&f, &[vec![1.0]], 120).unwrap();
        assert!((e[0].estimate - 1.0).abs() < 0.03);
        assert_eq!(e[0].support_value, 1.0);

        let hk = ConvexBody::interval(1.0, 2.0).unwrap();
        let g = synth(GroupPreset::Heisenberg, &hk, 64, DensitySpec::Constant(c(1.0)));
        let e = estimate_spectrum(&g, &[vec![1.0]], 200).unwrap();
        assert!((e[0].estimate - 2.0).abs() < 0.03);
        assert_eq!(e[0].support_value, -1.0);
        assert_eq!(e[0].max_modulus, 2.0);

        // Spectrum on the sub-interval [1, 1.5] only.
        let q = Arc::new(build_quadrature(&hk, 64).unwrap());
        let d = crate::spectral::SpectralDensity::from_fn(q, |l| c(if l[0] <= 1.5 { 1.0 } else { 0.0 })).unwrap();
        let sub = BandlimitedFunction::synthesize(&GroupPreset::Heisenberg.spec(), &d).unwrap();
        let e = estimate_spectrum(&sub, &[vec![1.0]], 200).unwrap();
        assert!((e[0].estimate - 1.5).abs() < 0.03);
    }

    #[test]
    fn invariant_suites() {
        for p in GroupPreset::ALL {
            let r = check_group_invariants(&p.spec(), 500, 9, 1e-12).unwrap();
            assert!(r.pass, "{:?} {:?}", p, r.extras);
        }
        let k = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.5]]).unwrap();
        let r = check_support_identities(&k, 300, 2, 1e-12).unwrap();
        assert!(r.pass, "{:?}", r.extras);
        let r = check_support_identities(&ConvexBody::interval(1.0, 2.0).unwrap(), 300, 2, 1e-12).unwrap();
        assert!(r.pass, "{:?}", r.extras);
    }

    #[test]
    fn kernel_reproduces_values() {
        let spec = GroupPreset::Heisenberg.spec();
        let body = ConvexBody::interval(1.0, 2.0).unwrap();
        let q = Arc::new(build_quadrature(&body, 24).unwrap());
        let d = DensitySpec::GaussianBump {
            center: vec![1.5],
            width: 0.2,
        }
        .build(q.clone(), None)
        .unwrap();
        let f = BandlimitedFunction::synthesize(&spec, &d).unwrap();
        let grid = build_slab_grid(&spec, 3.5, 40.0, 24, 320, None).unwrap();
        let probes: Vec<ComplexPoint> = [(0.0, 0.0, 0.1), (0.3, -0.2, 0.4), (-0.5, 0.1, 0.2)]
            .iter()
            .map(|(a, b, x)| {
                let g = GroupElement::new(vec![Complex64::new(*a, *b)], vec![*x]);
                ComplexPoint::embed(&spec, &g, &[0.0])
            })
            .collect();
        let r = check_kernel_reproducing(&f, &q, &probes, &grid).unwrap();
        assert!(r.pass, "{:?}", r.series);
    }

    #[test]
    fn probe_set_shape() {
        assert_eq!(h_probe_set(1).len(), 4);
        assert_eq!(h_probe_set(2).len(), 11);
    }
}
