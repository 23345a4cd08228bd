//! Spectral truncation, abelian multipliers and the modulation map.

pub mod gridio;
pub mod multiplier;

use num_complex::Complex64;

use crate::convexgeom::ConvexBody;
use crate::crgroup::{GroupElement, GroupSpec, DEFAULT_EPS_PD};
use crate::error::{Error, Result};
use crate::normcalc::{lp_norm, SlabGrid};
use crate::spectral::{synthesis_constant, BandlimitedFunction, SpectralDensity};

pub use gridio::{read_grid, write_grid, GRID_FORMAT_VERSION};
pub use multiplier::{
    disc_multiplier_growth, multiplier_apply_abelian, multiplier_apply_mask, multiplier_op_norms, op_norm_csv,
    test_family, GridFunction, OpNormRow,
};

/// Zeroes the density outside `k_target`. Idempotent.
pub fn project_spectral(density: &SpectralDensity, k_target: &ConvexBody) -> Result<SpectralDensity> {
    if k_target.dim() != density.quad.dim() {
        return Err(Error::DimensionMismatch {
            expected: density.quad.dim(),
            found: k_target.dim(),
        });
    }
    let values = density
        .quad
        .nodes
        .iter()
        .zip(&density.values)
        .map(|(l, v)| if k_target.contains(l, 0.0) { *v } else { Complex64::new(0.0, 0.0) })
        .collect();
    SpectralDensity::new(density.quad.clone(), values)
}

/// `⟨f, g⟩ = c Σ_q w_q |Pf(λ_q)| a_q conj(b_q)` for densities on one quadrature.
pub fn density_inner(spec: &GroupSpec, a: &SpectralDensity, b: &SpectralDensity) -> Result<Complex64> {
    if !a.shares_quadrature(b) {
        return Err(Error::QuadratureMismatch);
    }
    if a.quad.dim() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            found: a.quad.dim(),
        });
    }
    let c = synthesis_constant(spec.n(), spec.m());
    Ok(a.quad
        .nodes
        .iter()
        .zip(&a.quad.weights)
        .zip(a.values.iter().zip(&b.values))
        .map(|((l, w), (x, y))| c * w * spec.pfaffian_abs(l).value.abs() * x * y.conj())
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modulated {
    pub function: BandlimitedFunction,
    /// `λ` outside the polar of `Φ(E)`: the map is unbounded.
    pub unbounded: bool,
}

/// Pointwise product with `exp(i⟨λ, z⟩)`.
///
/// Node weights stay at the original nodes, so spectral norms of the
/// result are not meaningful; use grid norms.
pub fn modulate(f: &BandlimitedFunction, lambda: &[f64]) -> Result<Modulated> {
    let function = f.shift_frequencies(lambda)?;
    let scale = lambda.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let unbounded = !f.spec().in_phi_polar(lambda, DEFAULT_EPS_PD * scale);
    Ok(Modulated { function, unbounded })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(t, ‖M_λ τ_t f‖₂ / ‖τ_t f‖₂)` with `τ_t` the left translation by `(t ζ₀, 0)`.
    pub ratios: Vec<(f64, f64)>,
    /// Least-squares slope of `log ratio` against `t²`.
    pub exponent: f64,
    pub tail_indicator: f64,
}

/// Translated-norm sweep for the modulation map on a grid.
pub fn modulation_growth(
    f: &BandlimitedFunction,
    lambda: &[f64],
    zeta0: &[Complex64],
    ts: &[f64],
    grid: &SlabGrid,
) -> Result<GrowthReport> {
    if ts.len() < 2 {
        return Err(Error::InvalidArgument("need at least two translation scales".into()));
    }
    let spec = f.spec();
    let h = vec![0.0; spec.m()];
    let mut ratios = Vec::with_capacity(ts.len());
    let mut tail = 0.0_f64;
    for &t in ts {
        let g0 = GroupElement::new(zeta0.iter().map(|z| z * t).collect(), vec![0.0; spec.m()]);
        let moved = f.translate(&g0);
        let base = lp_norm(&moved, &h, 2.0, grid)?;
        let m = lp_norm(&modulate(&moved, lambda)?.function, &h, 2.0, grid)?;
        tail = tail.max(base.tail_indicator).max(m.tail_indicator);
        ratios.push((t, m.value / base.value));
    }
    let xs: Vec<f64> = ratios.iter().map(|(t, _)| t * t).collect();
    let ys: Vec<f64> = ratios.iter().map(|(_, r)| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(GrowthReport {
        ratios,
        exponent: sxy / sxx,
        tail_indicator: tail,
    })
}
