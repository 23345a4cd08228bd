//! Lattice sampling ratios with per-ball extrema on a sub-grid.

use num_complex::Complex64;
use rayon::prelude::*;

use super::lattice::{Lattice, Metric};
use crate::crgroup::{GroupElement, GroupSpec};
use crate::error::{Error, Result};
use crate::normcalc::{pairwise_sum, DEFAULT_NODE_BUDGET};
use crate::spectral::BandlimitedFunction;

/// Relative change of a per-ball maximum that marks a sub-grid as too coarse.
pub const SUBGRID_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingBounds {
    /// `δ^{Q/p} ‖min_{B̄(g_j, Rδ)} |f|‖_{ℓ^p} / ‖f‖_p`.
    pub lower_ratio: f64,
    /// `δ^{Q/p} ‖max_{B̄(g_j, Rδ)} |f|‖_{ℓ^p} / ‖f‖_p`.
    pub upper_ratio: f64,
    /// `‖max |f|‖_{ℓ^p} / ‖f‖_p` without the `δ^{Q/p}` factor.
    pub raw_upper: f64,
    /// Points per real axis of the sub-grid actually used.
    pub subgrid_points: usize,
    pub subgrid_too_coarse: bool,
}

/// Offsets `ε` with `g_j · ε` filling the ball `B̄(e, radius)`.
///
/// `ζ` coordinates step through `±radius/2`, `x` coordinates through
/// `±radius²/2` (`±radius/2` for the Euclidean metric); points outside
/// the ball are pulled back onto its boundary.
pub fn ball_offsets(spec: &GroupSpec, metric: Metric, radius: f64, per_axis: usize) -> Vec<GroupElement> {
    let n = spec.n();
    let dim = 2 * n + spec.m();
    if radius == 0.0 || per_axis <= 1 {
        return vec![spec.identity()];
    }
    let half = (per_axis / 2) as i64;
    let steps: Vec<f64> = (-half..=half).map(|k| k as f64 / half as f64 * 0.5).collect();
    let count = steps.len().pow(dim as u32);
    let mut out = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rest = flat;
        let c: Vec<f64> = (0..dim)
            .map(|k| {
                let s = steps[rest % steps.len()];
                rest /= steps.len();
                let scale = if k < 2 * n || metric == Metric::Euclidean {
                    radius
                } else {
                    radius * radius
                };
                s * scale
            })
            .collect();
        let mut g = GroupElement::from_coords(n, &c);
        let d = metric.distance(spec, &spec.identity(), &g);
        if d > radius {
            let t = radius / d;
            g = match metric {
                Metric::Gauge => spec.dilate(t, &g).expect("positive scale"),
                Metric::Euclidean => GroupElement::from_coords(n, &c.iter().map(|v| v * t).collect::<Vec<_>>()),
            };
        }
        out.push(g);
    }
    out
}

/// `|f|` at `g_j · ε` for all lattice points, `ε` fixed.
fn moduli_at_offset(f: &BandlimitedFunction, lattice: &Lattice, eps: &GroupElement) -> Vec<f64> {
    let spec = f.spec();
    match &lattice.factors {
        Some(fac) => product_moduli(f, &fac.zeta, &fac.x, eps),
        None => lattice
            .points
            .par_iter()
            .map(|g| {
                let p = spec.multiply(g, eps).expect("matching dimensions");
                f.evaluate_slice(&p, &vec![0.0; spec.m()]).norm()
            })
            .collect(),
    }
}

/// Separable evaluation over `zeta × x`:
/// `f(ζ_i + ε_ζ, x_j + ε_x + 2 Im Φ(ζ_i, ε_ζ)) = Σ_q A_{iq} e^{i⟨μ_q, x_j⟩}`.
fn product_moduli(
    f: &BandlimitedFunction,
    zetas: &[Vec<Complex64>],
    xs: &[Vec<f64>],
    eps: &GroupElement,
) -> Vec<f64> {
    let spec = f.spec();
    let terms: Vec<_> = f
        .terms()
        .iter()
        .filter(|t| t.coef != Complex64::new(0.0, 0.0))
        .collect();
    let a: Vec<Vec<Complex64>> = zetas
        .iter()
        .map(|zi| {
            let zeta: Vec<Complex64> = zi.iter().zip(&eps.zeta).map(|(a, b)| a + b).collect();
            let cross = spec.phi_sesq(zi, &eps.zeta);
            let shift: Vec<f64> = eps.x.iter().zip(&cross).map(|(e, c)| e + 2.0 * c.im).collect();
            let phi = spec.phi(&zeta);
            terms
                .iter()
                .map(|t| {
                    let beta: Complex64 = t.beta.iter().zip(&zeta).map(|(b, z)| b * z).sum();
                    let mut arg = beta;
                    for ((m, p), s) in t.mu.iter().zip(&phi).zip(&shift) {
                        arg += Complex64::new(-m * p, m * s);
                    }
                    t.coef * t.prefactor.eval(&zeta) * arg.exp()
                })
                .collect()
        })
        .collect();
    const CHUNK: usize = 256;
    let blocks: Vec<Vec<f64>> = xs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let xt: Vec<Vec<Complex64>> = terms
                .iter()
                .map(|t| {
                    chunk
                        .iter()
                        .map(|x| {
                            let ph: f64 = t.mu.iter().zip(x).map(|(m, v)| m * v).sum();
                            Complex64::new(0.0, ph).exp()
                        })
                        .collect()
                })
                .collect();
            let mut out = Vec::with_capacity(a.len() * chunk.len());
            let mut row = vec![Complex64::new(0.0, 0.0); chunk.len()];
            for ai in &a {
                row.iter_mut().for_each(|r| *r = Complex64::new(0.0, 0.0));
                for (aq, xq) in ai.iter().zip(&xt) {
                    for (r, x) in row.iter_mut().zip(xq) {
                        *r += aq * x;
                    }
                }
                out.extend(row.iter().map(|v| v.norm()));
            }
            out
        })
        .collect();
    // Reassemble ζ-outer order from the x-chunked blocks.
    let nx = xs.len();
    let mut out = vec![0.0; zetas.len() * nx];
    for (b, block) in blocks.iter().enumerate() {
        let start = b * CHUNK;
        let width = (nx - start).min(CHUNK);
        for i in 0..zetas.len() {
            out[i * nx + start..i * nx + start + width].copy_from_slice(&block[i * width..(i + 1) * width]);
        }
    }
    out
}

fn extrema(f: &BandlimitedFunction, lattice: &Lattice, offsets: &[GroupElement]) -> (Vec<f64>, Vec<f64>) {
    let len = lattice.len();
    let mut hi = vec![0.0_f64; len];
    let mut lo = vec![f64::INFINITY; len];
    for eps in offsets {
        let v = moduli_at_offset(f, lattice, eps);
        for ((h, l), x) in hi.iter_mut().zip(lo.iter_mut()).zip(&v) {
            *h = h.max(*x);
            *l = l.min(*x);
        }
    }
    (lo, hi)
}

fn lp(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    let powered: Vec<f64> = values.iter().map(|v| v.powf(p)).collect();
    pairwise_sum(&powered).powf(1.0 / p)
}

/// Sampling ratios of `f` on `lattice` against the reference norm `f_norm = ‖f‖_p`.
///
/// Per-ball extrema use `subgrid` points per real axis; the grid is
/// refined once (`2(subgrid - 1) + 1`) and the finer values are kept.
pub fn sampling_bounds(
    f: &BandlimitedFunction,
    lattice: &Lattice,
    p: f64,
    r_delta: f64,
    subgrid: usize,
    f_norm: f64,
) -> Result<SamplingBounds> {
    let spec = f.spec();
    if lattice.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("sampling exponent {p}")));
    }
    if !(f_norm > 0.0) {
        return Err(Error::InvalidArgument("reference norm must be positive".into()));
    }
    if let Some(g) = lattice.points.first() {
        if g.zeta.len() != spec.n() || g.x.len() != spec.m() {
            return Err(Error::DimensionMismatch {
                expected: 2 * spec.n() + spec.m(),
                found: g.coords().len(),
            });
        }
    }
    let coarse_n = subgrid.max(1) | 1;
    let fine_n = if r_delta > 0.0 { 2 * (coarse_n - 1).max(1) + 1 } else { 1 };
    let fine_offsets = ball_offsets(spec, lattice.metric, r_delta, fine_n);
    let work = (fine_offsets.len() as u128) * (lattice.len() as u128) * (f.terms().len() as u128);
    if work > 1000 * DEFAULT_NODE_BUDGET {
        return Err(Error::BudgetExceeded {
            nodes: work,
            cap: 1000 * DEFAULT_NODE_BUDGET,
        });
    }
    let coarse = extrema(f, lattice, &ball_offsets(spec, lattice.metric, r_delta, coarse_n));
    let (lo, hi) = if fine_n > coarse_n {
        extrema(f, lattice, &fine_offsets)
    } else {
        coarse.clone()
    };
    let top = hi.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-3 * top;
    let too_coarse = hi
        .iter()
        .zip(&coarse.1)
        .any(|(fine, c)| *fine > floor && (fine - c).abs() > SUBGRID_TOLERANCE * fine);
    let q = spec.q() as f64;
    let scale = if p.is_infinite() { 1.0 } else { lattice.delta.powf(q / p) };
    let raw_upper = lp(&hi, p) / f_norm;
    Ok(SamplingBounds {
        lower_ratio: scale * lp(&lo, p) / f_norm,
        upper_ratio: scale * raw_upper,
        raw_upper,
        subgrid_points: fine_n,
        subgrid_too_coarse: too_coarse,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::convexgeom::ConvexBody;
    use crate::presets::GroupPreset;
    use crate::sampling::lattice::{grid_points_e, grid_points_f, lattice_product, Window};
    use crate::spectral::{build_quadrature, DensitySpec};

    #[test]
    fn offsets_stay_in_ball() {
        for preset in [GroupPreset::Heisenberg, GroupPreset::Example110b] {
            let spec = preset.spec();
            let offs = ball_offsets(&spec, Metric::Gauge, 0.7, 3);
            assert_eq!(offs.len(), 3usize.pow(spec.q() as u32 - spec.m() as u32));
            assert!(offs.iter().all(|g| spec.gauge(g) <= 0.7 + 1e-12));
        }
        assert_eq!(ball_offsets(&GroupPreset::Heisenberg.spec(), Metric::Gauge, 0.0, 3).len(), 1);
    }

    #[test]
    fn separable_matches_direct() {
        let spec = GroupPreset::Heisenberg.spec();
        let body = ConvexBody::interval(1.0, 2.0).unwrap();
        let q = Arc::new(build_quadrature(&body, 12).unwrap());
        let d = DensitySpec::Random { seed: Some(3), count: 3 }.build(q, None).unwrap();
        let f = BandlimitedFunction::synthesize(&spec, &d).unwrap();
        let e = grid_points_e(1, 0.6, 1.2);
        let x = grid_points_f(1, 0.4, 2.0);
        let w = Window::symmetric(1, 1, 0.5, 0.5);
        let mut lat = lattice_product(&spec, &e, &x, Metric::Gauge, &w, 0.25).unwrap();
        let eps = GroupElement::new(vec![Complex64::new(0.1, -0.2)], vec![0.05]);
        let fast = moduli_at_offset(&f, &lat, &eps);
        lat.factors = None;
        let slow = moduli_at_offset(&f, &lat, &eps);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b));
        }
    }
}
