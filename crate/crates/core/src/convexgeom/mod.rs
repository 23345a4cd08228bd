//! Compact convex bodies `K ⊂ R^m` and their supporting functions.
//!
//! The supporting function follows the reflected convention
//! `H_K(h) = sup_{λ ∈ -K} ⟨λ, h⟩ = -inf_{λ ∈ K} ⟨λ, h⟩`.

pub mod hull;

use crate::error::{Error, Result};
use crate::vecops::{add, dist, dot, norm, sub};

const GEOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Empty,
    Polytope(Vec<Vec<f64>>),
    Ball { center: Vec<f64>, radius: f64 },
    Sum(Vec<ConvexBody>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
}

/// The closed half-space `⟨normal, λ⟩ ≥ offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn value(&self, lambda: &[f64]) -> f64 {
        dot(&self.normal, lambda) - self.offset
    }

    pub fn contains(&self, lambda: &[f64], tol: f64) -> bool {
        self.value(lambda) >= -tol
    }
}

/// Nonnegative orthant `{λ_j ≥ 0}`.
pub fn orthant(m: usize) -> Vec<HalfSpace> {
    (0..m)
        .map(|j| {
            let mut n = vec![0.0; m];
            n[j] = 1.0;
            HalfSpace::new(n, 0.0)
        })
        .collect()
}

/// Parses `"orthant"` or `"halfspace(a, b, ...)"` (brackets optional).
pub fn cone_preset(spec: &str, m: usize) -> Result<Vec<HalfSpace>> {
    let s = spec.trim();
    if s == "orthant" {
        return Ok(orthant(m));
    }
    if let Some(inner) = s.strip_prefix("halfspace(").and_then(|r| r.strip_suffix(')')) {
        let inner = inner.trim().trim_start_matches('[').trim_end_matches(']');
        let normal: std::result::Result<Vec<f64>, _> =
            inner.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let normal = normal.map_err(|e| Error::InvalidArgument(format!("cone normal: {e}")))?;
        if normal.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: normal.len(),
            });
        }
        return Ok(vec![HalfSpace::new(normal, 0.0)]);
    }
    Err(Error::InvalidArgument(format!("unknown cone preset `{s}`")))
}

/// Deterministic unit directions covering the sphere.
pub fn probe_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).sqrt();
                    let t = golden * k as f64;
                    let mut v = vec![r * t.cos(), y, r * t.sin()];
                    v.resize(dim, 0.0);
                    let l = norm(&v);
                    v.iter().map(|x| x / l).collect()
                })
                .collect()
        }
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("non-finite coordinate".into()))
    }
}

impl ConvexBody {
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().ok_or(Error::EmptyBody)?.len();
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            check_finite(v)?;
        }
        Ok(Self {
            dim,
            kind: BodyKind::Polytope(vertices),
        })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::polytope(vec![vec![a.min(b)], vec![a.max(b)]])
    }

    /// Axis-parallel box `Π [lo_j, hi_j]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        let d = lo.len();
        let verts = (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|j| if mask >> j & 1 == 1 { hi[j] } else { lo[j] })
                    .collect()
            })
            .collect();
        Self::polytope(verts)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_finite(&center)?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius {radius}")));
        }
        Ok(Self {
            dim: center.len(),
            kind: BodyKind::Ball { center, radius },
        })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            kind: BodyKind::Empty,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_empty(&self) -> bool {
        match &self.kind {
            BodyKind::Empty => true,
            BodyKind::Sum(parts) => parts.iter().any(|p| p.is_empty()),
            _ => false,
        }
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        match &self.kind {
            BodyKind::Polytope(v) => Some(v),
            _ => None,
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    pub fn support_function(&self, h: &[f64]) -> Result<f64> {
        self.check_dim(h.len())?;
        Ok(self.support(h))
    }

    /// `H_K(h)` without dimension checking.
    pub fn support(&self, h: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Empty => f64::NEG_INFINITY,
            BodyKind::Polytope(v) => v
                .iter()
                .map(|p| -dot(p, h))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyKind::Ball { center, radius } => -dot(center, h) + radius * norm(h),
            BodyKind::Sum(parts) => parts.iter().map(|p| p.support(h)).sum(),
        }
    }

    /// `max_{λ ∈ K} |⟨λ, v⟩|`.
    pub fn max_abs_pairing(&self, v: &[f64]) -> f64 {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        self.support(v).max(self.support(&neg))
    }

    pub fn minkowski_sum(&self, other: &ConvexBody) -> Result<ConvexBody> {
        self.check_dim(other.dim)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(self.dim));
        }
        let mut parts = Vec::new();
        for b in [self, other] {
            match &b.kind {
                BodyKind::Sum(p) => parts.extend(p.iter().cloned()),
                _ => parts.push(b.clone()),
            }
        }
        Ok(Self {
            dim: self.dim,
            kind: BodyKind::Sum(parts),
        })
    }

    /// `λ + K`.
    pub fn translate(&self, lambda: &[f64]) -> Result<ConvexBody> {
        self.check_dim(lambda.len())?;
        Ok(match &self.kind {
            BodyKind::Empty => self.clone(),
            BodyKind::Polytope(v) => Self {
                dim: self.dim,
                kind: BodyKind::Polytope(v.iter().map(|p| add(p, lambda)).collect()),
            },
            BodyKind::Ball { center, radius } => Self {
                dim: self.dim,
                kind: BodyKind::Ball {
                    center: add(center, lambda),
                    radius: *radius,
                },
            },
            BodyKind::Sum(parts) => {
                let mut parts = parts.clone();
                parts[0] = parts[0].translate(lambda)?;
                Self {
                    dim: self.dim,
                    kind: BodyKind::Sum(parts),
                }
            }
        })
    }

    /// Materializes a polytope when the body is a polytope or a sum of polytopes.
    pub fn as_polytope(&self) -> Option<ConvexBody> {
        match &self.kind {
            BodyKind::Polytope(_) => Some(self.clone()),
            BodyKind::Sum(parts) => {
                let mut acc: Vec<Vec<f64>> = vec![vec![0.0; self.dim]];
                for p in parts {
                    let pv = p.as_polytope()?;
                    let verts = pv.vertices()?;
                    let mut next = Vec::with_capacity(acc.len() * verts.len());
                    for a in &acc {
                        for v in verts {
                            next.push(add(a, v));
                        }
                    }
                    let keep = hull::extreme_indices(&next, GEOM_TOL);
                    acc = keep.into_iter().map(|i| next[i].clone()).collect();
                }
                Some(Self {
                    dim: self.dim,
                    kind: BodyKind::Polytope(acc),
                })
            }
            _ => None,
        }
    }

    /// The polytope with redundant vertices removed.
    pub fn pruned(&self) -> ConvexBody {
        match &self.kind {
            BodyKind::Polytope(v) => {
                let keep = hull::extreme_indices(v, GEOM_TOL);
                Self {
                    dim: self.dim,
                    kind: BodyKind::Polytope(keep.into_iter().map(|i| v[i].clone()).collect()),
                }
            }
            _ => self.clone(),
        }
    }

    /// Dimension of the affine span.
    pub fn affine_dim(&self) -> usize {
        match &self.kind {
            BodyKind::Empty => 0,
            BodyKind::Polytope(v) => hull::affine_frame(v, GEOM_TOL).dim(),
            BodyKind::Ball { radius, .. } => {
                if *radius > 0.0 {
                    self.dim
                } else {
                    0
                }
            }
            BodyKind::Sum(parts) => match self.as_polytope() {
                Some(p) => p.affine_dim(),
                None => parts.iter().map(|p| p.affine_dim()).max().unwrap_or(0),
            },
        }
    }

    /// Facets as inward half-spaces, for full-dimensional polytopes.
    pub fn facets(&self) -> Result<Vec<HalfSpace>> {
        let poly = self.as_polytope().ok_or(Error::NonPolytope)?;
        let v = poly.vertices().ok_or(Error::NonPolytope)?;
        if self.dim > 3 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let ad = poly.affine_dim();
        if ad < self.dim {
            return Err(Error::DegenerateBody {
                affine_dim: ad,
                dim: self.dim,
            });
        }
        Ok(hull::facets(v, GEOM_TOL)
            .into_iter()
            .map(|(n, b)| HalfSpace::new(n.iter().map(|x| -x).collect(), -b))
            .collect())
    }

    /// Closed membership with absolute tolerance `tol`.
    pub fn contains(&self, lambda: &[f64], tol: f64) -> bool {
        if lambda.len() != self.dim {
            return false;
        }
        match &self.kind {
            BodyKind::Empty => false,
            BodyKind::Ball { center, radius } => dist(center, lambda) <= radius + tol,
            BodyKind::Polytope(v) => polytope_contains(v, lambda, tol),
            BodyKind::Sum(_) => match self.as_polytope() {
                Some(p) => p.contains(lambda, tol),
                None => probe_directions(self.dim, 720)
                    .iter()
                    .all(|u| dot(lambda, u) <= self.support(&u.iter().map(|x| -x).collect::<Vec<_>>()) + tol),
            },
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&vec![0.0; self.dim], GEOM_TOL)
    }

    /// `H_K(h) = H_K(-h)` on probe directions.
    pub fn is_symmetric(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let scale = 1.0 + self.max_abs_pairing(&vec![1.0; self.dim]).abs();
        probe_directions(self.dim, 256).iter().all(|h| {
            let neg: Vec<f64> = h.iter().map(|x| -x).collect();
            (self.support(h) - self.support(&neg)).abs() <= 1e-9 * scale
        })
    }

    /// `(gauge, in_polar)`: the gauge is `H_K(h)` and needs `0 ∈ K`;
    /// `h` lies in the polar iff `⟨λ, h⟩ ≥ -1` on `K`.
    pub fn gauge_polar_membership(&self, h: &[f64]) -> Result<(f64, bool)> {
        self.check_dim(h.len())?;
        if !self.contains_origin() {
            return Err(Error::OriginNotContained);
        }
        let g = self.support(h).max(0.0);
        Ok((g, self.in_polar(h)))
    }

    pub fn in_polar(&self, h: &[f64]) -> bool {
        self.support(h) <= 1.0 + GEOM_TOL
    }

    /// Clips a polytope by half-spaces `⟨n, λ⟩ ≥ b`; may return the empty body.
    pub fn intersect_with_cone(&self, halfspaces: &[HalfSpace]) -> Result<ConvexBody> {
        if self.dim > 3 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.is_empty() {
            return Ok(self.clone());
        }
        let poly = self
            .as_polytope()
            .ok_or(Error::UnsupportedBody("cone clipping needs a polytope"))?;
        let mut verts = poly.vertices().map(|v| v.to_vec()).unwrap_or_default();
        for hs in halfspaces {
            self.check_dim(hs.normal.len())?;
            let vals: Vec<f64> = verts.iter().map(|v| hs.value(v)).collect();
            let scale = verts
                .iter()
                .flat_map(|v| v.iter().map(|x| x.abs()))
                .fold(1.0_f64, f64::max);
            let tol = GEOM_TOL * scale;
            let mut next: Vec<Vec<f64>> = verts
                .iter()
                .zip(&vals)
                .filter(|(_, &s)| s >= -tol)
                .map(|(v, _)| v.clone())
                .collect();
            if next.is_empty() {
                return Ok(Self::empty(self.dim));
            }
            for (i, a) in verts.iter().enumerate() {
                for (j, b) in verts.iter().enumerate() {
                    if vals[i] > tol && vals[j] < -tol {
                        let t = vals[i] / (vals[i] - vals[j]);
                        next.push(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect());
                    }
                }
            }
            let keep = hull::extreme_indices(&next, GEOM_TOL);
            verts = keep.into_iter().map(|i| next[i].clone()).collect();
        }
        Ok(Self {
            dim: self.dim,
            kind: BodyKind::Polytope(verts),
        })
    }

    /// Lebesgue measure in `R^dim`.
    pub fn volume(&self) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        if let BodyKind::Ball { radius, .. } = &self.kind {
            let r = *radius;
            return match self.dim {
                1 => Ok(2.0 * r),
                2 => Ok(std::f64::consts::PI * r * r),
                3 => Ok(4.0 / 3.0 * std::f64::consts::PI * r * r * r),
                d => Err(Error::UnsupportedDimension(d)),
            };
        }
        let poly = self
            .as_polytope()
            .ok_or(Error::UnsupportedBody("volume of a mixed Minkowski sum"))?;
        let v = poly.vertices().unwrap_or(&[]);
        if poly.affine_dim() < self.dim {
            return Ok(0.0);
        }
        match self.dim {
            1 => {
                let lo = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                Ok(hi - lo)
            }
            2 => {
                let h = hull::hull2d(v, GEOM_TOL);
                let mut a = 0.0;
                for k in 0..h.len() {
                    let p = &v[h[k]];
                    let q = &v[h[(k + 1) % h.len()]];
                    a += p[0] * q[1] - q[0] * p[1];
                }
                Ok(0.5 * a.abs())
            }
            3 => {
                let c = centroid(v);
                let faces = hull::hull3d(v, GEOM_TOL);
                let mut vol = 0.0;
                for f in faces {
                    let a = sub(&v[f[0]], &c);
                    let b = sub(&v[f[1]], &c);
                    let d = sub(&v[f[2]], &c);
                    vol += (a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0])
                        + a[2] * (b[0] * d[1] - b[1] * d[0]))
                        .abs()
                        / 6.0;
                }
                Ok(vol)
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// A point of the relative interior: vertex mean or ball center.
    pub fn center(&self) -> Vec<f64> {
        match &self.kind {
            BodyKind::Empty => vec![0.0; self.dim],
            BodyKind::Polytope(v) => centroid(v),
            BodyKind::Ball { center, .. } => center.clone(),
            BodyKind::Sum(parts) => parts
                .iter()
                .map(|p| p.center())
                .fold(vec![0.0; self.dim], |a, b| add(&a, &b)),
        }
    }

    /// Euclidean diameter (exact for polytopes and balls, support-bound for sums).
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            BodyKind::Empty => 0.0,
            BodyKind::Ball { radius, .. } => 2.0 * radius,
            BodyKind::Polytope(v) => {
                let mut d = 0.0_f64;
                for a in v {
                    for b in v {
                        d = d.max(dist(a, b));
                    }
                }
                d
            }
            BodyKind::Sum(parts) => parts.iter().map(|p| p.diameter()).sum(),
        }
    }
}

fn centroid(v: &[Vec<f64>]) -> Vec<f64> {
    let d = v[0].len();
    (0..d)
        .map(|k| v.iter().map(|p| p[k]).sum::<f64>() / v.len() as f64)
        .collect()
}

fn polytope_contains(v: &[Vec<f64>], lambda: &[f64], tol: f64) -> bool {
    let frame = hull::affine_frame(v, GEOM_TOL);
    let slack = tol + GEOM_TOL * (1.0 + norm(lambda));
    if frame.residual(lambda) > slack {
        return false;
    }
    let local: Vec<Vec<f64>> = v.iter().map(|p| frame.coords(p)).collect();
    let x = frame.coords(lambda);
    if frame.dim() == 0 {
        return true;
    }
    hull::facets(&local, GEOM_TOL)
        .iter()
        .all(|(n, b)| dot(n, &x) <= b + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexBody {
        ConvexBody::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    fn same_vertex_set(a: &ConvexBody, b: &ConvexBody) -> bool {
        let (va, vb) = (a.vertices().unwrap(), b.vertices().unwrap());
        va.len() == vb.len()
            && va
                .iter()
                .all(|p| vb.iter().any(|q| dist(p, q) < 1e-10))
    }

    #[test]
    fn support_examples() {
        let k = ConvexBody::interval(-2.0, 2.0).unwrap();
        assert_eq!(k.support_function(&[3.0]).unwrap(), 6.0);
        let s = ConvexBody::polytope(vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.support_function(&[2.0, 5.0]).unwrap(), -2.0);
        let t = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(t.support_function(&[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            t.support_function(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(ConvexBody::empty(2).support(&[1.0, 0.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn minkowski_examples() {
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let b = ConvexBody::ball(vec![0.0], 0.5).unwrap();
        assert_eq!(k.minkowski_sum(&b).unwrap().support(&[2.0]), 3.0);
        let zero = ConvexBody::polytope(vec![vec![0.0]]).unwrap();
        assert_eq!(k.minkowski_sum(&zero).unwrap().support(&[-0.7]), k.support(&[-0.7]));
    }

    #[test]
    fn gauge_and_polar() {
        let k = ConvexBody::interval(-3.0, 3.0).unwrap();
        assert_eq!(k.gauge_polar_membership(&[-2.0]).unwrap().0, 6.0);
        assert_eq!(k.gauge_polar_membership(&[0.0]).unwrap().0, 0.0);
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        assert!(k.in_polar(&[-0.5]));
        assert!(!k.in_polar(&[-2.0]));
        let far = ConvexBody::interval(1.0, 2.0).unwrap();
        assert_eq!(
            far.gauge_polar_membership(&[1.0]),
            Err(Error::OriginNotContained)
        );
    }

    #[test]
    fn clipping_examples() {
        let k = ConvexBody::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let clipped = k.intersect_with_cone(&orthant(2)).unwrap();
        assert!(same_vertex_set(&clipped, &unit_square()));
        let inside = unit_square().intersect_with_cone(&orthant(2)).unwrap();
        assert!(same_vertex_set(&inside, &unit_square()));
        let neg = ConvexBody::boxed(&[-2.0, -2.0], &[-1.0, -1.0]).unwrap();
        assert!(neg.intersect_with_cone(&orthant(2)).unwrap().is_empty());
        let cube = ConvexBody::boxed(&[-1.0; 4], &[1.0; 4]).unwrap();
        assert_eq!(
            cube.intersect_with_cone(&orthant(4)),
            Err(Error::UnsupportedDimension(4))
        );
    }

    #[test]
    fn clipping_3d_and_idempotence() {
        let k = ConvexBody::boxed(&[-1.0; 3], &[1.0; 3]).unwrap();
        let hs = vec![HalfSpace::new(vec![1.0, 1.0, 1.0], 0.0)];
        let once = k.intersect_with_cone(&hs).unwrap();
        let twice = once.intersect_with_cone(&hs).unwrap();
        assert!(same_vertex_set(&once, &twice));
        assert!((once.volume().unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn containment_and_volume() {
        let sq = unit_square();
        assert!(sq.contains(&[0.5, 0.5], 0.0));
        assert!(sq.contains(&[1.0, 0.3], 1e-12));
        assert!(!sq.contains(&[1.1, 0.3], 1e-12));
        assert!((sq.volume().unwrap() - 1.0).abs() < 1e-15);
        let seg = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(seg.contains(&[0.5, 0.5], 1e-12));
        assert!(!seg.contains(&[0.5, 0.6], 1e-12));
        assert_eq!(seg.affine_dim(), 1);
        let ball = ConvexBody::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        assert!((ball.volume().unwrap() - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn symmetry_probe() {
        assert!(ConvexBody::interval(-2.0, 2.0).unwrap().is_symmetric());
        assert!(!ConvexBody::interval(1.0, 2.0).unwrap().is_symmetric());
        assert!(ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap().is_symmetric());
    }

    #[test]
    fn cone_presets_parse() {
        assert_eq!(cone_preset("orthant", 2).unwrap().len(), 2);
        let h = cone_preset("halfspace([1, -1])", 2).unwrap();
        assert_eq!(h[0].normal, vec![1.0, -1.0]);
        assert!(cone_preset("halfspace(1)", 2).is_err());
        assert!(cone_preset("wedge", 2).is_err());
    }
}
