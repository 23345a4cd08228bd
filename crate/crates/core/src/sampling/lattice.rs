//! Lattices on the group with certified separation and covering.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::crgroup::{GroupElement, GroupSpec};
use crate::error::{Error, Result};
use crate::normcalc::DEFAULT_NODE_BUDGET;

/// Distance used for certificates and balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Left-invariant gauge distance `ρ(g⁻¹ h)`.
    Gauge,
    /// Euclidean distance of the real coordinates.
    Euclidean,
}

impl Metric {
    pub fn distance(&self, spec: &GroupSpec, g: &GroupElement, h: &GroupElement) -> f64 {
        match self {
            Metric::Gauge => {
                let cross = spec.phi_sesq(&g.zeta, &h.zeta);
                let z2: f64 = g.zeta.iter().zip(&h.zeta).map(|(a, b)| (b - a).norm_sqr()).sum();
                let x2: f64 = g
                    .x
                    .iter()
                    .zip(&h.x)
                    .zip(&cross)
                    .map(|((a, b), c)| (b - a + 2.0 * (-c).im).powi(2))
                    .sum();
                (z2 * z2 + x2).sqrt().sqrt()
            }
            Metric::Euclidean => {
                let z2: f64 = g.zeta.iter().zip(&h.zeta).map(|(a, b)| (b - a).norm_sqr()).sum();
                let x2: f64 = g.x.iter().zip(&h.x).map(|(a, b)| (b - a).powi(2)).sum();
                (z2 + x2).sqrt()
            }
        }
    }
}

/// Axis-aligned box in the real coordinates `(Re ζ, Im ζ, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidArgument("window bounds out of order".into()));
        }
        Ok(Self { lo, hi })
    }

    /// `|Re ζ_i|, |Im ζ_i| ≤ zeta_extent` and `|x_j| ≤ x_extent`.
    pub fn symmetric(n: usize, m: usize, zeta_extent: f64, x_extent: f64) -> Self {
        let mut hi = vec![zeta_extent; 2 * n];
        hi.extend(std::iter::repeat_n(x_extent, m));
        Self {
            lo: hi.iter().map(|v| -v).collect(),
            hi,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| *c >= a - 1e-12 && *c <= b + 1e-12)
    }

    /// Cartesian probe grid of the given spacing, endpoints included.
    pub fn probes(&self, spacing: f64, cap: u128) -> Result<Vec<Vec<f64>>> {
        if !(spacing > 0.0) {
            return Err(Error::NonPositiveScale(spacing));
        }
        let counts: Vec<usize> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| ((b - a) / spacing + 1e-9).floor() as usize + 1)
            .collect();
        let total: u128 = counts.iter().map(|c| *c as u128).product();
        if total > cap {
            return Err(Error::BudgetExceeded { nodes: total, cap });
        }
        let mut out = Vec::with_capacity(total as usize);
        for flat in 0..total as usize {
            let mut rest = flat;
            let p = counts
                .iter()
                .zip(&self.lo)
                .map(|(c, a)| {
                    let k = rest % c;
                    rest /= c;
                    a + k as f64 * spacing
                })
                .collect();
            out.push(p);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificates {
    /// Minimum pairwise distance; `∞` for a single point.
    pub min_distance: f64,
    /// Largest distance from a probe to the nearest lattice point.
    pub covering_margin: f64,
    pub probe_count: usize,
}

/// Factorisation `points = zeta × x` with `ζ` outer, kept for fast evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFactors {
    pub zeta: Vec<Vec<Complex64>>,
    pub x: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub points: Vec<GroupElement>,
    pub delta: f64,
    pub r: f64,
    pub metric: Metric,
    pub certificates: Certificates,
    pub factors: Option<ProductFactors>,
}

impl Lattice {
    /// Certify `points` as a `(delta, r)`-lattice over `window`.
    pub fn certified(
        spec: &GroupSpec,
        points: Vec<GroupElement>,
        delta: f64,
        r: f64,
        metric: Metric,
        window: &Window,
        probe_spacing: f64,
    ) -> Result<Self> {
        let certificates = lattice_verify(spec, &points, delta, r, metric, window, probe_spacing)?;
        Ok(Self {
            points,
            delta,
            r,
            metric,
            certificates,
            factors: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `spacing · (ℤ + iℤ)^n` with every real coordinate in `[-extent, extent]`.
pub fn grid_points_e(n: usize, spacing: f64, extent: f64) -> Vec<Vec<Complex64>> {
    let axis = axis_points(spacing, extent);
    cartesian(&axis, 2 * n)
        .into_iter()
        .map(|c| c.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
        .collect()
}

/// `spacing · ℤ^m` with every coordinate in `[-extent, extent]`.
pub fn grid_points_f(m: usize, spacing: f64, extent: f64) -> Vec<Vec<f64>> {
    cartesian(&axis_points(spacing, extent), m)
}

fn axis_points(spacing: f64, extent: f64) -> Vec<f64> {
    let k = (extent / spacing + 1e-9).floor() as i64;
    (-k..=k).map(|i| i as f64 * spacing).collect()
}

fn cartesian(axis: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Uniform jitter of each real coordinate by at most `amount`.
pub fn jitter(points: &[GroupElement], amount: f64, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|g| {
            let n = g.zeta.len();
            let c: Vec<f64> = g
                .coords()
                .into_iter()
                .map(|v| v + amount * (2.0 * rng.random::<f64>() - 1.0))
                .collect();
            GroupElement::from_coords(n, &c)
        })
        .collect()
}

/// Hash grid answering "all points within distance `radius`" queries.
struct Neighbours<'a> {
    spec: &'a GroupSpec,
    metric: Metric,
    points: &'a [GroupElement],
    cells: Vec<f64>,
    map: HashMap<Vec<i64>, Vec<usize>>,
    twist: Vec<f64>,
    zeta_dims: usize,
}

impl<'a> Neighbours<'a> {
    fn new(spec: &'a GroupSpec, metric: Metric, points: &'a [GroupElement], radius: f64) -> Self {
        let coords: Vec<Vec<f64>> = points.iter().map(|g| g.coords()).collect();
        let zeta_dims = 2 * spec.n();
        // |Im Φ_j(a, b)| ≤ ‖A_j‖_F |a| |b|.
        let twist: Vec<f64> = spec
            .matrices()
            .iter()
            .map(|a| 2.0 * a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let zmax = points
            .iter()
            .map(|g| g.zeta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let dim = coords.first().map_or(0, |c| c.len());
        let cells: Vec<f64> = (0..dim)
            .map(|k| {
                let w = if k < zeta_dims || metric == Metric::Euclidean {
                    radius
                } else {
                    radius * radius + twist[k - zeta_dims] * zmax * radius
                };
                w.max(1e-300)
            })
            .collect();
        let mut map: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, c) in coords.iter().enumerate() {
            map.entry(key(c, &cells)).or_default().push(i);
        }
        Self {
            spec,
            metric,
            points,
            cells,
            map,
            twist,
            zeta_dims,
        }
    }

    /// Calls `visit(index, distance)` for every point within `radius` of `q`.
    fn within(&self, q: &GroupElement, radius: f64, mut visit: impl FnMut(usize, f64)) {
        let qc = q.coords();
        let qz = q.zeta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let ranges: Vec<(i64, i64)> = qc
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let w = if k < self.zeta_dims || self.metric == Metric::Euclidean {
                    radius
                } else {
                    radius * radius + self.twist[k - self.zeta_dims] * qz * radius
                };
                (
                    ((v - w) / self.cells[k]).floor() as i64,
                    ((v + w) / self.cells[k]).floor() as i64,
                )
            })
            .collect();
        let total: i64 = ranges.iter().map(|(a, b)| b - a + 1).product();
        if total as usize > 4 * self.points.len() + 64 {
            // Sparse lattice relative to the query box: scan directly.
            for (i, p) in self.points.iter().enumerate() {
                let d = self.metric.distance(self.spec, q, p);
                if d <= radius {
                    visit(i, d);
                }
            }
            return;
        }
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            if let Some(list) = self.map.get(&k) {
                for &i in list {
                    let d = self.metric.distance(self.spec, q, &self.points[i]);
                    if d <= radius {
                        visit(i, d);
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == k.len() {
                    return;
                }
                k[axis] += 1;
                if k[axis] <= ranges[axis].1 {
                    break;
                }
                k[axis] = ranges[axis].0;
                axis += 1;
            }
        }
    }
}

fn key(c: &[f64], cells: &[f64]) -> Vec<i64> {
    c.iter().zip(cells).map(|(v, s)| (v / s).floor() as i64).collect()
}

/// Exact minimum pairwise distance and an attaining pair.
pub fn min_pairwise_distance(spec: &GroupSpec, points: &[GroupElement], metric: Metric) -> (f64, usize, usize) {
    let n = points.len();
    if n < 2 {
        return (f64::INFINITY, 0, 0);
    }
    // Upper bound from a few full scans.
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..n.min(16) {
        for j in 0..n {
            if j != i {
                let d = metric.distance(spec, &points[i], &points[j]);
                if d < best.0 {
                    best = (d, i.min(j), i.max(j));
                }
            }
        }
    }
    if best.0 == 0.0 {
        return best;
    }
    let radius = best.0;
    let nb = Neighbours::new(spec, metric, points, radius);
    let found = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local = (f64::INFINITY, 0, 0);
            nb.within(&points[i], radius, |j, d| {
                if j > i && d < local.0 {
                    local = (d, i, j);
                }
            });
            local
        })
        .reduce(
            || (f64::INFINITY, 0, 0),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a },
        );
    if found.0 <= best.0 {
        found
    } else {
        best
    }
}

/// Certify separation (`≥ 2δ`) and covering (`≤ Rδ` on the probe grid).
pub fn lattice_verify(
    spec: &GroupSpec,
    points: &[GroupElement],
    delta: f64,
    r: f64,
    metric: Metric,
    window: &Window,
    probe_spacing: f64,
) -> Result<Certificates> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(delta > 0.0) {
        return Err(Error::NonPositiveScale(delta));
    }
    if window.dim() != 2 * spec.n() + spec.m() {
        return Err(Error::DimensionMismatch {
            expected: 2 * spec.n() + spec.m(),
            found: window.dim(),
        });
    }
    let (min_distance, i, j) = min_pairwise_distance(spec, points, metric);
    if min_distance < 2.0 * delta * (1.0 - 1e-12) {
        return Err(Error::NotSeparated(i, j, min_distance));
    }
    let probes = window.probes(probe_spacing, DEFAULT_NODE_BUDGET)?;
    let reach = r * delta;
    let nb = Neighbours::new(spec, metric, points, reach);
    let nearest: Vec<f64> = probes
        .par_iter()
        .map(|pc| {
            let q = GroupElement::from_coords(spec.n(), pc);
            let mut best = f64::INFINITY;
            nb.within(&q, reach * (1.0 + 1e-12), |_, d| best = best.min(d));
            best
        })
        .collect();
    let mut margin = 0.0_f64;
    for (pc, d) in probes.iter().zip(&nearest) {
        if !d.is_finite() {
            let q = GroupElement::from_coords(spec.n(), pc);
            let distance = points
                .iter()
                .map(|p| metric.distance(spec, &q, p))
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NotCovering {
                witness: pc.clone(),
                distance,
            });
        }
        margin = margin.max(*d);
    }
    Ok(Certificates {
        min_distance,
        covering_margin: margin,
        probe_count: probes.len(),
    })
}

/// Product family `(ζ_j′, x_j)` of an `E`-lattice and an `F`-lattice.
///
/// The inputs are an `E` family at scale `(δ, R)` and an `F` family at
/// `(δ², R²)`. The returned lattice carries the realized parameters
/// `δ′ = min distance / 2` and `R′ = covering margin / δ′`.
pub fn lattice_product(
    spec: &GroupSpec,
    lat_e: &[Vec<Complex64>],
    lat_f: &[Vec<f64>],
    metric: Metric,
    window: &Window,
    probe_spacing: f64,
) -> Result<Lattice> {
    if lat_e.is_empty() || lat_f.is_empty() {
        return Err(Error::EmptyInput);
    }
    for z in lat_e {
        if z.len() != spec.n() {
            return Err(Error::DimensionMismatch {
                expected: spec.n(),
                found: z.len(),
            });
        }
    }
    for x in lat_f {
        if x.len() != spec.m() {
            return Err(Error::DimensionMismatch {
                expected: spec.m(),
                found: x.len(),
            });
        }
    }
    let points: Vec<GroupElement> = lat_e
        .iter()
        .flat_map(|z| lat_f.iter().map(move |x| GroupElement::new(z.clone(), x.clone())))
        .collect();
    let (min_distance, _, _) = min_pairwise_distance(spec, &points, metric);
    let delta = if min_distance.is_finite() {
        min_distance / 2.0
    } else {
        // A single point: any scale is separated; use the probe spacing.
        probe_spacing
    };
    let probes = window.probes(probe_spacing, DEFAULT_NODE_BUDGET)?;
    let margin = covering_margin(spec, &points, metric, &probes);
    if !margin.0.is_finite() {
        return Err(Error::NotCovering {
            witness: margin.1,
            distance: f64::INFINITY,
        });
    }
    let certificates = Certificates {
        min_distance,
        covering_margin: margin.0,
        probe_count: probes.len(),
    };
    Ok(Lattice {
        points,
        delta,
        r: (margin.0 / delta).max(1.0),
        metric,
        certificates,
        factors: Some(ProductFactors {
            zeta: lat_e.to_vec(),
            x: lat_f.to_vec(),
        }),
    })
}

/// Max over probes of the nearest-point distance, with the worst probe.
fn covering_margin(
    spec: &GroupSpec,
    points: &[GroupElement],
    metric: Metric,
    probes: &[Vec<f64>],
) -> (f64, Vec<f64>) {
    let mut radius = points
        .iter()
        .skip(1)
        .map(|p| metric.distance(spec, &points[0], p))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    if let Some(first) = probes.first() {
        let q = GroupElement::from_coords(spec.n(), first);
        radius = radius.min(
            points
                .iter()
                .map(|p| metric.distance(spec, &q, p))
                .fold(f64::INFINITY, f64::min)
                .max(1e-3),
        );
    }
    // Grow the search radius until every probe sees a point.
    loop {
        let nb = Neighbours::new(spec, metric, points, radius);
        let nearest: Vec<f64> = probes
            .par_iter()
            .map(|pc| {
                let q = GroupElement::from_coords(spec.n(), pc);
                let mut best = f64::INFINITY;
                nb.within(&q, radius, |_, d| best = best.min(d));
                best
            })
            .collect();
        if nearest.iter().all(|d| d.is_finite()) {
            let (k, d) = nearest
                .iter()
                .enumerate()
                .fold((0, 0.0_f64), |acc, (k, d)| if *d > acc.1 { (k, *d) } else { acc });
            return (d, probes.get(k).cloned().unwrap_or_default());
        }
        if radius > 1e12 {
            return (f64::INFINITY, Vec::new());
        }
        radius *= 2.0;
    }
}
