//! Uniform slab grids on `N` and Riemann-sum `L^p` norms of slices `f_h`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::crgroup::GroupSpec;
use crate::error::{Error, Result};
use crate::spectral::BandlimitedFunction;

pub const DEFAULT_NODE_BUDGET: u128 = 10_000_000;

/// Tail indicator above which a norm is flagged.
pub const TAIL_WARNING: f64 = 1e-3;

/// Tensor grid of cell centres on `[-L_ζ, L_ζ]^{2n} × [-L_x, L_x]^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabGrid {
    pub n: usize,
    pub m: usize,
    pub zeta_extent: f64,
    pub x_extent: f64,
    pub zeta_points: usize,
    pub x_points: usize,
    /// All `ζ` nodes, each with `n` complex coordinates.
    pub zeta_nodes: Vec<Vec<Complex64>>,
    /// Per-axis `x` coordinates, shared by all `m` axes.
    pub x_axis: Vec<f64>,
    pub zeta_axis: Vec<f64>,
    pub cell_volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub value: f64,
    /// Fraction of `Σ|f|^p` (or of the max, for `p = ∞`) on the outer 10% shell.
    pub tail_indicator: f64,
    pub tail_warning: bool,
    /// Largest neighbour difference, a proxy for `max|∇f| × step` (`p = ∞` only).
    pub lipschitz_slack: Option<f64>,
}

fn axis(extent: f64, points: usize) -> Vec<f64> {
    let step = 2.0 * extent / points as f64;
    (0..points)
        .map(|i| -extent + (i as f64 + 0.5) * step)
        .collect()
}

pub fn build_slab_grid(
    spec: &GroupSpec,
    zeta_extent: f64,
    x_extent: f64,
    zeta_points: usize,
    x_points: usize,
    cap: Option<u128>,
) -> Result<SlabGrid> {
    let (n, m) = (spec.n(), spec.m());
    for (v, what) in [(zeta_extent, "zeta extent"), (x_extent, "x extent")] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{what} must be positive")));
        }
    }
    if zeta_points == 0 || x_points == 0 {
        return Err(Error::InvalidArgument("grid point counts must be positive".into()));
    }
    let nodes = (zeta_points as u128)
        .checked_pow(2 * n as u32)
        .and_then(|a| (x_points as u128).checked_pow(m as u32).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX);
    let cap = cap.unwrap_or(DEFAULT_NODE_BUDGET);
    if nodes > cap {
        return Err(Error::BudgetExceeded { nodes, cap });
    }
    let zeta_axis = axis(zeta_extent, zeta_points);
    let x_axis = axis(x_extent, x_points);
    let nz = zeta_points.pow(2 * n as u32);
    let zeta_nodes = (0..nz)
        .map(|flat| {
            let mut rest = flat;
            let mut coords = [0.0f64; 2].repeat(n);
            for c in coords.iter_mut() {
                *c = zeta_axis[rest % zeta_points];
                rest /= zeta_points;
            }
            (0..n)
                .map(|k| Complex64::new(coords[2 * k], coords[2 * k + 1]))
                .collect()
        })
        .collect();
    let dz = 2.0 * zeta_extent / zeta_points as f64;
    let dx = 2.0 * x_extent / x_points as f64;
    Ok(SlabGrid {
        n,
        m,
        zeta_extent,
        x_extent,
        zeta_points,
        x_points,
        zeta_nodes,
        x_axis,
        zeta_axis,
        cell_volume: dz.powi(2 * n as i32) * dx.powi(m as i32),
    })
}

impl SlabGrid {
    pub fn node_count(&self) -> usize {
        self.zeta_nodes.len() * self.x_count()
    }

    pub fn x_count(&self) -> usize {
        self.x_points.pow(self.m as u32)
    }

    /// Coordinates of the flat `x` index.
    pub fn x_node(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        (0..self.m)
            .map(|_| {
                let v = self.x_axis[rest % self.x_points];
                rest /= self.x_points;
                v
            })
            .collect()
    }

    /// Outer-shell flags for `ζ` nodes and flat `x` nodes.
    fn shell_flags(&self) -> (Vec<bool>, Vec<bool>) {
        let zcut = 0.9 * self.zeta_extent;
        let xcut = 0.9 * self.x_extent;
        let z = self
            .zeta_nodes
            .iter()
            .map(|n| n.iter().any(|c| c.re.abs() > zcut || c.im.abs() > zcut))
            .collect();
        let x = (0..self.x_count())
            .map(|j| self.x_node(j).iter().any(|v| v.abs() > xcut))
            .collect();
        (z, x)
    }
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Values of `f_h` on the grid, `ζ` index outer and `x` index inner.
pub fn grid_values(f: &BandlimitedFunction, h: &[f64], grid: &SlabGrid) -> Vec<Vec<Complex64>> {
    let spec = f.spec();
    let terms = f.terms();
    let nx = grid.x_count();
    // x-factors e^{i⟨μ, x⟩}, built per axis.
    let xt: Vec<Vec<Complex64>> = terms
        .iter()
        .map(|t| {
            let per_axis: Vec<Vec<Complex64>> = t
                .mu
                .iter()
                .map(|m| {
                    grid.x_axis
                        .iter()
                        .map(|x| Complex64::new(0.0, m * x).exp())
                        .collect()
                })
                .collect();
            (0..nx)
                .map(|flat| {
                    let mut rest = flat;
                    let mut v = Complex64::new(1.0, 0.0);
                    for ax in &per_axis {
                        v *= ax[rest % grid.x_points];
                        rest /= grid.x_points;
                    }
                    v
                })
                .collect()
        })
        .collect();
    grid.zeta_nodes
        .par_iter()
        .map(|zeta| {
            let phi = spec.phi(zeta);
            let mut row = vec![Complex64::new(0.0, 0.0); nx];
            for (t, xrow) in terms.iter().zip(&xt) {
                if t.coef == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let beta: Complex64 = t.beta.iter().zip(zeta).map(|(b, z)| b * z).sum();
                let damp: f64 = t
                    .mu
                    .iter()
                    .zip(&phi)
                    .zip(h)
                    .map(|((m, p), hh)| m * (p + hh))
                    .sum();
                let zfac = t.coef * t.prefactor.eval(zeta) * (beta - damp).exp();
                if zfac == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (r, x) in row.iter_mut().zip(xrow) {
                    *r += zfac * x;
                }
            }
            row
        })
        .collect()
}

/// `(Σ |f_h|^p · cell)^{1/p}`, or the grid max for `p = ∞`.
pub fn lp_norm(f: &BandlimitedFunction, h: &[f64], p: f64, grid: &SlabGrid) -> Result<NormReport> {
    if h.len() != grid.m || f.spec().m() != grid.m || f.spec().n() != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.m,
            found: h.len(),
        });
    }
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("norm exponent {p}")));
    }
    let values = grid_values(f, h, grid);
    Ok(norm_of_values(&values, p, grid))
}

/// Norm, tail indicator and slack for precomputed grid values.
pub fn norm_of_values(values: &[Vec<Complex64>], p: f64, grid: &SlabGrid) -> NormReport {
    let (zshell, xshell) = grid.shell_flags();
    if p.is_infinite() {
        let mut max = 0.0_f64;
        let mut shell_max = 0.0_f64;
        for (row, zs) in values.iter().zip(&zshell) {
            for (v, xs) in row.iter().zip(&xshell) {
                let a = v.norm();
                max = max.max(a);
                if *zs || *xs {
                    shell_max = shell_max.max(a);
                }
            }
        }
        let tail = if max > 0.0 { shell_max / max } else { 0.0 };
        return NormReport {
            value: max,
            tail_indicator: tail,
            tail_warning: tail >= TAIL_WARNING,
            lipschitz_slack: Some(neighbour_slack(values, grid)),
        };
    }
    let (rows, shell_rows): (Vec<f64>, Vec<f64>) = values
        .iter()
        .zip(&zshell)
        .map(|(row, zs)| {
            let powers: Vec<f64> = if p == 2.0 {
                row.iter().map(|v| v.norm_sqr()).collect()
            } else {
                row.iter().map(|v| v.norm().powf(p)).collect()
            };
            let masked: Vec<f64> = powers
                .iter()
                .zip(&xshell)
                .map(|(v, xs)| if *zs || *xs { *v } else { 0.0 })
                .collect();
            (pairwise_sum(&powers), pairwise_sum(&masked))
        })
        .unzip();
    let total = pairwise_sum(&rows);
    let tail_mass = pairwise_sum(&shell_rows);
    let tail = if total > 0.0 { tail_mass / total } else { 0.0 };
    NormReport {
        value: (total * grid.cell_volume).powf(1.0 / p),
        tail_indicator: tail,
        tail_warning: tail >= TAIL_WARNING,
        lipschitz_slack: None,
    }
}

fn neighbour_slack(values: &[Vec<Complex64>], grid: &SlabGrid) -> f64 {
    let mut slack = 0.0_f64;
    for row in values {
        for w in row.windows(2) {
            slack = slack.max((w[1] - w[0]).norm());
        }
    }
    // Along the first real ζ axis, neighbouring rows differ by one index step.
    if grid.n > 0 {
        for (zi, row) in values.iter().enumerate() {
            if (zi + 1) % grid.zeta_points == 0 || zi + 1 >= values.len() {
                continue;
            }
            for (a, b) in row.iter().zip(&values[zi + 1]) {
                slack = slack.max((a - b).norm());
            }
        }
    }
    slack
}

/// Grid inner product `Σ f_h conj(g_h) · cell`.
pub fn grid_inner(
    f: &BandlimitedFunction,
    g: &BandlimitedFunction,
    h: &[f64],
    grid: &SlabGrid,
) -> Complex64 {
    let a = grid_values(f, h, grid);
    let b = grid_values(g, h, grid);
    let (re, im): (Vec<f64>, Vec<f64>) = a
        .iter()
        .zip(&b)
        .map(|(ra, rb)| {
            let prods: Vec<Complex64> = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).collect();
            let re: Vec<f64> = prods.iter().map(|c| c.re).collect();
            let im: Vec<f64> = prods.iter().map(|c| c.im).collect();
            (pairwise_sum(&re), pairwise_sum(&im))
        })
        .unzip();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * grid.cell_volume
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::convexgeom::ConvexBody;
    use crate::presets::GroupPreset;
    use crate::spectral::{build_quadrature, DensitySpec};

    fn sinc(kappa: f64, order: usize) -> BandlimitedFunction {
        let q = Arc::new(build_quadrature(&ConvexBody::interval(-kappa, kappa).unwrap(), order).unwrap());
        let d = DensitySpec::Constant(Complex64::new(1.0, 0.0)).build(q, None).unwrap();
        BandlimitedFunction::synthesize(&GroupPreset::Abelian1d.spec(), &d).unwrap()
    }

    #[test]
    fn grid_sizes() {
        let h = GroupPreset::Heisenberg.spec();
        let g = build_slab_grid(&h, 4.0, 20.0, 32, 128, None).unwrap();
        assert_eq!(g.node_count(), 32 * 32 * 128);
        let a = GroupPreset::Abelian1d.spec();
        let g = build_slab_grid(&a, 1.0, 20.0, 8, 100, None).unwrap();
        assert_eq!(g.node_count(), 100);
        assert!(matches!(
            build_slab_grid(&h, 4.0, 20.0, 100, 2000, None),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            build_slab_grid(&h, 4.0, 20.0, 10, 10, Some(99)),
            Err(Error::BudgetExceeded { nodes: 1000, cap: 99 })
        ));
    }

    #[test]
    fn sinc_l2_norms() {
        let f = sinc(1.0, 2048);
        let spec = GroupPreset::Abelian1d.spec();
        let grid = build_slab_grid(&spec, 1.0, 1500.0, 1, 6000, None).unwrap();
        let r = lp_norm(&f, &[0.0], 2.0, &grid).unwrap();
        assert!((r.value - (1.0 / PI).sqrt()).abs() < 0.01 * (1.0 / PI).sqrt());
        for h in [0.5, -1.0] {
            let r = lp_norm(&f, &[h], 2.0, &grid).unwrap();
            let expect = ((2.0 * h).sinh() / (2.0 * PI * h)).sqrt();
            assert!((r.value - expect).abs() < 0.01 * expect, "h={h}");
        }
        let zero = f.zeroed();
        assert_eq!(lp_norm(&zero, &[0.0], 2.0, &grid).unwrap().value, 0.0);
        let sup = lp_norm(&f, &[0.0], f64::INFINITY, &grid).unwrap();
        // The max sits between cell centres; the neighbour slack bounds the miss.
        assert!(sup.value <= 1.0 / PI + 1e-12);
        assert!(1.0 / PI - sup.value <= sup.lipschitz_slack.unwrap());
    }

    #[test]
    fn heisenberg_plancherel_on_grid() {
        let spec = GroupPreset::Heisenberg.spec();
        let q = Arc::new(build_quadrature(&ConvexBody::interval(1.0, 2.0).unwrap(), 128).unwrap());
        let d = DensitySpec::Constant(Complex64::new(1.0, 0.0)).build(q, None).unwrap();
        let f = BandlimitedFunction::synthesize(&spec, &d).unwrap();
        let grid = build_slab_grid(&spec, 3.5, 150.0, 24, 600, None).unwrap();
        let r = lp_norm(&f, &[0.0], 2.0, &grid).unwrap();
        let exact = (1.5 / (PI * PI)).sqrt();
        assert!((r.value - exact).abs() < 0.01 * exact, "{} vs {}", r.value, exact);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let a = pairwise_sum(&v);
        let b = pairwise_sum(&v);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - v.iter().sum::<f64>()).abs() < 1e-12);
    }
}
