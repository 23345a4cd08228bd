//! Fourier multipliers by indicator functions on sampled grids over `F`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rustfft::{FftDirection, FftPlanner};

use crate::convexgeom::ConvexBody;
use crate::error::{Error, Result};
use crate::normcalc::{pairwise_sum, DEFAULT_NODE_BUDGET};

/// Samples `f(x_k)` at `x_k = -L + k · 2L/N` along each axis, axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub dims: Vec<usize>,
    pub extents: Vec<f64>,
    pub data: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(dims: Vec<usize>, extents: Vec<f64>, data: Vec<Complex64>) -> Result<Self> {
        if dims.len() != extents.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: extents.len(),
            });
        }
        if dims.is_empty() || dims.len() > 2 {
            return Err(Error::UnsupportedDimension(dims.len()));
        }
        if dims.contains(&0) {
            return Err(Error::EmptyInput);
        }
        if let Some(l) = extents.iter().find(|l| !(**l > 0.0)) {
            return Err(Error::NonPositiveScale(*l));
        }
        let len: u128 = dims.iter().map(|d| *d as u128).product();
        if len > DEFAULT_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                nodes: len,
                cap: DEFAULT_NODE_BUDGET,
            });
        }
        if data.len() as u128 != len {
            return Err(Error::DimensionMismatch {
                expected: len as usize,
                found: data.len(),
            });
        }
        Ok(Self { dims, extents, data })
    }

    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(dims: Vec<usize>, extents: Vec<f64>, f: F) -> Result<Self> {
        let len: usize = dims.iter().product();
        let probe = Self::new(dims, extents, vec![Complex64::new(0.0, 0.0); len])?;
        let data = (0..len).map(|k| f(&probe.point(k))).collect();
        Ok(Self { data, ..probe })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.extents[axis] / self.dims[axis] as f64
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        (0..self.dims.len())
            .map(|a| {
                let k = rest % self.dims[a];
                rest /= self.dims[a];
                -self.extents[a] + k as f64 * self.spacing(a)
            })
            .collect()
    }

    /// Angular frequency of DFT bin `flat`, signed bins `-N/2..N/2`.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        (0..self.dims.len())
            .map(|a| {
                let n = self.dims[a];
                let k = rest % n;
                rest /= n;
                let signed = if k >= n.div_ceil(2) { k as f64 - n as f64 } else { k as f64 };
                2.0 * PI * signed / (n as f64 * self.spacing(a))
            })
            .collect()
    }

    /// `(Σ |f|^p · cell)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let cell: f64 = (0..self.dims.len()).map(|a| self.spacing(a)).product();
        if p.is_infinite() {
            return self.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let powered: Vec<f64> = self.data.iter().map(|v| v.norm().powf(p) * cell).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    }
}

fn fft_in_place(g: &mut GridFunction, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let n0 = g.dims[0];
    let f0 = planner.plan_fft(n0, direction);
    for row in g.data.chunks_mut(n0) {
        f0.process(row);
    }
    if g.dims.len() == 2 {
        let n1 = g.dims[1];
        let f1 = planner.plan_fft(n1, direction);
        let mut col = vec![Complex64::new(0.0, 0.0); n1];
        for i in 0..n0 {
            for (j, c) in col.iter_mut().enumerate() {
                *c = g.data[i + j * n0];
            }
            f1.process(&mut col);
            for (j, c) in col.iter().enumerate() {
                g.data[i + j * n0] = *c;
            }
        }
    }
}

/// Forward DFT, multiply bin `ξ` by `mask(ξ)`, inverse DFT.
pub fn multiplier_apply_mask<M: Fn(&[f64]) -> bool>(samples: &GridFunction, mask: M) -> GridFunction {
    let mut g = samples.clone();
    fft_in_place(&mut g, FftDirection::Forward);
    let scale = 1.0 / g.len() as f64;
    for k in 0..g.len() {
        if mask(&g.frequency(k)) {
            g.data[k] *= scale;
        } else {
            g.data[k] = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut g, FftDirection::Inverse);
    g
}

/// The `χ_K` multiplier for a polytope `K`, as a product of half-space cuts.
pub fn multiplier_apply_abelian(samples: &GridFunction, k: &ConvexBody) -> Result<GridFunction> {
    if k.dim() != samples.dims.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.dims.len(),
            found: k.dim(),
        });
    }
    let cuts = k.facets()?;
    let tol = 1e-9 * (1.0 + k.diameter());
    Ok(multiplier_apply_mask(samples, |xi| cuts.iter().all(|h| h.contains(xi, tol))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpNormRow {
    pub p: f64,
    /// `max ‖χ_K f‖_p / ‖f‖_p` over the test family.
    pub estimate: f64,
    pub family_size: usize,
}

/// Seeded test family: noise, its projection, Gaussian bumps and box indicators.
pub fn test_family(dims: &[usize], extents: &[f64], seed: u64, size: usize) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let len: usize = dims.iter().product();
    let mut out = Vec::with_capacity(size);
    for i in 0..size {
        let g = match i % 3 {
            0 => {
                let data = (0..len)
                    .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                    .collect();
                GridFunction::new(dims.to_vec(), extents.to_vec(), data)?
            }
            1 => {
                let c: Vec<f64> = extents
                    .iter()
                    .map(|l| Uniform::new(-0.5 * l, 0.5 * l).expect("range").sample(&mut rng))
                    .collect();
                let s = Uniform::new(0.02, 0.25).expect("range").sample(&mut rng) * extents[0];
                GridFunction::from_fn(dims.to_vec(), extents.to_vec(), |x| {
                    let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                    Complex64::new((-r2 / (2.0 * s * s)).exp(), 0.0)
                })?
            }
            _ => {
                let half: Vec<f64> = extents
                    .iter()
                    .map(|l| Uniform::new(0.05 * l, 0.5 * l).expect("range").sample(&mut rng))
                    .collect();
                GridFunction::from_fn(dims.to_vec(), extents.to_vec(), |x| {
                    let inside = x.iter().zip(&half).all(|(a, h)| a.abs() <= *h);
                    Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
                })?
            }
        };
        out.push(g);
    }
    Ok(out)
}

/// Empirical operator norms of a multiplier over a test family.
///
/// The family is augmented with the image of each member, so that the
/// `p = 2` estimate sees functions on which the multiplier is the identity.
pub fn multiplier_op_norms<M: Fn(&GridFunction) -> Result<GridFunction>>(
    apply: M,
    family: &[GridFunction],
    ps: &[f64],
) -> Result<Vec<OpNormRow>> {
    let mut pairs = Vec::with_capacity(2 * family.len());
    for f in family {
        let mf = apply(f)?;
        let mmf = apply(&mf)?;
        pairs.push((f.clone(), mf.clone()));
        pairs.push((mf, mmf));
    }
    Ok(ps
        .iter()
        .map(|&p| {
            let estimate = pairs
                .iter()
                .filter_map(|(f, mf)| {
                    let d = f.lp_norm(p);
                    (d > 1e-300).then(|| mf.lp_norm(p) / d)
                })
                .fold(0.0, f64::max);
            OpNormRow {
                p,
                estimate,
                family_size: pairs.len(),
            }
        })
        .collect())
}

/// CSV table `p,estimate,family_size`.
pub fn op_norm_csv(rows: &[OpNormRow]) -> String {
    let mut s = String::from("p,estimate,family_size\n");
    for r in rows {
        s.push_str(&format!("{},{:.12e},{}\n", r.p, r.estimate, r.family_size));
    }
    s
}

/// `L⁴` operator-norm estimates of the disc multiplier at increasing resolution.
///
/// Reports `(N, estimate)` per resolution; there is no pass/fail meaning.
pub fn disc_multiplier_growth(resolutions: &[usize], extent: f64, radius: f64, seed: u64) -> Result<Vec<(usize, f64)>> {
    resolutions
        .iter()
        .map(|&n| {
            let dims = vec![n, n];
            let extents = vec![extent, extent];
            let family = test_family(&dims, &extents, seed, 6)?;
            let rows = multiplier_op_norms(
                |g| Ok(multiplier_apply_mask(g, |xi| xi[0] * xi[0] + xi[1] * xi[1] <= radius * radius)),
                &family,
                &[4.0],
            )?;
            Ok((n, rows[0].estimate))
        })
        .collect()
}
