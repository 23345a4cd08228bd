//! Convex hulls in dimension ≤ 3 with reduction to the affine span for
//! degenerate point sets.

use crate::vecops::{dot, norm, sub};

/// Orthonormal frame of the affine span of a point set.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AffineFrame {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, p: &[f64]) -> Vec<f64> {
        let d = sub(p, &self.origin);
        self.basis.iter().map(|b| dot(b, &d)).collect()
    }

    /// Distance from `p` to the affine span.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let mut d = sub(p, &self.origin);
        for b in &self.basis {
            let c = dot(b, &d);
            for (di, bi) in d.iter_mut().zip(b) {
                *di -= c * bi;
            }
        }
        norm(&d)
    }
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter().map(|v| v.abs()))
        .fold(0.0_f64, f64::max)
        .max(1.0)
}

/// Greedy Gram–Schmidt on the differences `p_i - p_0`.
pub fn affine_frame(points: &[Vec<f64>], tol: f64) -> AffineFrame {
    let origin = points[0].clone();
    let dim = origin.len();
    let thresh = tol * scale_of(points);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for p in points {
            let mut d = sub(p, &origin);
            for b in &basis {
                let c = dot(b, &d);
                for (di, bi) in d.iter_mut().zip(b) {
                    *di -= c * bi;
                }
            }
            let r = norm(&d);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, d));
            }
        }
        match best {
            Some((r, d)) if r > thresh => basis.push(d.iter().map(|v| v / r).collect()),
            _ => break,
        }
    }
    AffineFrame { origin, basis }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertex indices (monotone chain), collinear points dropped.
pub fn hull2d(pts: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .total_cmp(&pts[b][0])
            .then(pts[a][1].total_cmp(&pts[b][1]))
    });
    idx.dedup_by(|a, b| (pts[*a][0] - pts[*b][0]).abs() <= eps && (pts[*a][1] - pts[*b][1]).abs() <= eps);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= eps
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= eps
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn face_normal(pts: &[Vec<f64>], f: [usize; 3]) -> [f64; 3] {
    let n = cross3(&sub(&pts[f[1]], &pts[f[0]]), &sub(&pts[f[2]], &pts[f[0]]));
    let l = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if l == 0.0 {
        return [0.0; 3];
    }
    [n[0] / l, n[1] / l, n[2] / l]
}

/// Outward-oriented triangular faces of a full-dimensional 3-D point set.
pub fn hull3d(pts: &[Vec<f64>], eps: f64) -> Vec<[usize; 3]> {
    // Initial simplex: greedy affinely independent picks.
    let mut init = vec![0usize];
    let far = (0..pts.len())
        .max_by(|&a, &b| norm(&sub(&pts[a], &pts[0])).total_cmp(&norm(&sub(&pts[b], &pts[0]))))
        .unwrap_or(0);
    init.push(far);
    let line = sub(&pts[far], &pts[0]);
    let third = (0..pts.len())
        .max_by(|&a, &b| {
            let ca = cross3(&line, &sub(&pts[a], &pts[0]));
            let cb = cross3(&line, &sub(&pts[b], &pts[0]));
            norm(&ca).total_cmp(&norm(&cb))
        })
        .unwrap_or(0);
    init.push(third);
    let plane = cross3(&line, &sub(&pts[third], &pts[0]));
    let fourth = (0..pts.len())
        .max_by(|&a, &b| {
            dot(&plane, &sub(&pts[a], &pts[0]))
                .abs()
                .total_cmp(&dot(&plane, &sub(&pts[b], &pts[0])).abs())
        })
        .unwrap_or(0);
    init.push(fourth);

    let centroid: Vec<f64> = (0..3)
        .map(|k| init.iter().map(|&i| pts[i][k]).sum::<f64>() / 4.0)
        .collect();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for skip in 0..4 {
        let mut f = [0usize; 3];
        let mut j = 0;
        for (k, &i) in init.iter().enumerate() {
            if k != skip {
                f[j] = i;
                j += 1;
            }
        }
        let n = face_normal(pts, f);
        if dot(&n, &sub(&centroid, &pts[f[0]])) > 0.0 {
            f.swap(1, 2);
        }
        faces.push(f);
    }

    for p in 0..pts.len() {
        if init.contains(&p) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|&f| dot(&face_normal(pts, f), &sub(&pts[p], &pts[f[0]])) > eps)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            for k in 0..3 {
                edges.push((f[k], f[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| !edges.contains(&(b, a)))
            .cloned()
            .collect();
        let mut kept: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, v)| !**v)
            .map(|(f, _)| *f)
            .collect();
        for (a, b) in horizon {
            kept.push([a, b, p]);
        }
        faces = kept;
    }
    faces
}

/// Indices of the extreme points of `points`.
pub fn extreme_indices(points: &[Vec<f64>], tol: f64) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let frame = affine_frame(points, tol);
    let local: Vec<Vec<f64>> = points.iter().map(|p| frame.coords(p)).collect();
    let eps = tol * scale_of(points);
    let mut out = match frame.dim() {
        0 => vec![0],
        1 => {
            let lo = (0..local.len()).min_by(|&a, &b| local[a][0].total_cmp(&local[b][0]));
            let hi = (0..local.len()).max_by(|&a, &b| local[a][0].total_cmp(&local[b][0]));
            vec![lo.unwrap_or(0), hi.unwrap_or(0)]
        }
        2 => hull2d(&local, eps),
        _ => {
            let faces = hull3d(&local, eps);
            faces.iter().flat_map(|f| f.iter().cloned()).collect()
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Outward facets `⟨n, x⟩ ≤ b` (unit normals) of a full-dimensional point set.
pub fn facets(points: &[Vec<f64>], tol: f64) -> Vec<(Vec<f64>, f64)> {
    let dim = points[0].len();
    let eps = tol * scale_of(points);
    match dim {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            vec![(vec![1.0], hi), (vec![-1.0], -lo)]
        }
        2 => {
            let h = hull2d(points, eps);
            (0..h.len())
                .map(|k| {
                    let a = &points[h[k]];
                    let b = &points[h[(k + 1) % h.len()]];
                    let e = sub(b, a);
                    let l = norm(&e);
                    let n = vec![e[1] / l, -e[0] / l];
                    let off = dot(&n, a);
                    (n, off)
                })
                .collect()
        }
        _ => hull3d(points, eps)
            .into_iter()
            .map(|f| {
                let n = face_normal(points, f).to_vec();
                let off = dot(&n, &points[f[0]]);
                (n, off)
            })
            .collect(),
    }
}
