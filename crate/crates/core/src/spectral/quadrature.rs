//! Gauss–Legendre rules on intervals, parallelotopes, simplices and balls.

use std::f64::consts::PI;

use crate::convexgeom::{hull, BodyKind, ConvexBody};
use crate::error::{Error, Result};
use crate::vecops::{add, sub};

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub body: ConvexBody,
    pub order: usize,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_q f(λ_q)`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| w * f(n))
            .sum()
    }

    /// Weighted centroid of the nodes.
    pub fn centroid(&self) -> Vec<f64> {
        let total = self.total_weight();
        let mut c = vec![0.0; self.dim()];
        for (n, w) in self.nodes.iter().zip(&self.weights) {
            for (ci, ni) in c.iter_mut().zip(n) {
                *ci += w * ni / total;
            }
        }
        c
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    (
        x.iter().map(|t| a + h * (t + 1.0)).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Edge vectors when the vertex set is a parallelotope `p0 + Σ [0,1] e_i`.
fn parallelotope_frame(v: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = v[0].len();
    if v.len() != 1 << d || d < 2 {
        return None;
    }
    let scale = v
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(1.0_f64, f64::max);
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-10 * scale);
    let p0 = &v[0];
    let others: Vec<usize> = (1..v.len()).collect();
    let mut pick = vec![0usize; d];
    fn choose(
        start: usize,
        depth: usize,
        others: &[usize],
        pick: &mut Vec<usize>,
        test: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == pick.len() {
            return test(pick);
        }
        for k in start..others.len() {
            pick[depth] = others[k];
            if choose(k + 1, depth + 1, others, pick, test) {
                return true;
            }
        }
        false
    }
    let mut found: Option<Vec<Vec<f64>>> = None;
    let mut test = |idx: &[usize]| {
        let edges: Vec<Vec<f64>> = idx.iter().map(|&i| sub(&v[i], p0)).collect();
        if det(&edges).abs() <= 1e-12 * scale.powi(d as i32) {
            return false;
        }
        for mask in 0..1usize << d {
            let mut p = p0.clone();
            for (j, e) in edges.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    p = add(&p, e);
                }
            }
            if !v.iter().any(|q| close(q, &p)) {
                return false;
            }
        }
        found = Some(edges);
        true
    };
    if choose(0, 0, &others, &mut pick, &mut test) {
        found.map(|e| (p0.clone(), e))
    } else {
        None
    }
}

struct RuleBuilder {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl RuleBuilder {
    fn push(&mut self, p: Vec<f64>, w: f64) {
        self.nodes.push(p);
        self.weights.push(w);
    }
}

fn tensor_parallelotope(out: &mut RuleBuilder, p0: &[f64], edges: &[Vec<f64>], order: usize) {
    let (t, w) = gauss_legendre_on(order, 0.0, 1.0);
    let jac = det(edges).abs();
    let d = edges.len();
    let total = order.pow(d as u32);
    for flat in 0..total {
        let mut p = p0.to_vec();
        let mut weight = jac;
        let mut rest = flat;
        for e in edges {
            let k = rest % order;
            rest /= order;
            for (pi, ei) in p.iter_mut().zip(e) {
                *pi += t[k] * ei;
            }
            weight *= w[k];
        }
        out.push(p, weight);
    }
}

/// Collapsed rule on the triangle `A + x(B-A) + y(C-B)`, `0 ≤ y ≤ x ≤ 1`.
fn triangle_rule(out: &mut RuleBuilder, a: &[f64], b: &[f64], c: &[f64], order: usize) {
    let (t, w) = gauss_legendre_on(order, 0.0, 1.0);
    let e1 = sub(b, a);
    let e2 = sub(c, b);
    let jac = det(&[e1.clone(), e2.clone()]).abs();
    for (u, wu) in t.iter().zip(&w) {
        for (v, wv) in t.iter().zip(&w) {
            let x = *u;
            let y = u * v;
            let p = vec![a[0] + x * e1[0] + y * e2[0], a[1] + x * e1[1] + y * e2[1]];
            out.push(p, jac * wu * wv * u);
        }
    }
}

/// Collapsed rule on the tetrahedron `A + x(B-A) + y(C-B) + z(D-C)`.
fn tetra_rule(out: &mut RuleBuilder, a: &[f64], b: &[f64], c: &[f64], d: &[f64], order: usize) {
    let (t, w) = gauss_legendre_on(order, 0.0, 1.0);
    let e1 = sub(b, a);
    let e2 = sub(c, b);
    let e3 = sub(d, c);
    let jac = det(&[e1.clone(), e2.clone(), e3.clone()]).abs();
    if jac <= 1e-300 {
        return;
    }
    for (u, wu) in t.iter().zip(&w) {
        for (v, wv) in t.iter().zip(&w) {
            for (s, ws) in t.iter().zip(&w) {
                let x = *u;
                let y = u * v;
                let z = u * v * s;
                let p = (0..3)
                    .map(|k| a[k] + x * e1[k] + y * e2[k] + z * e3[k])
                    .collect();
                out.push(p, jac * wu * wv * ws * u * u * v);
            }
        }
    }
}

fn polytope_rule(out: &mut RuleBuilder, v: &[Vec<f64>], order: usize) -> Result<()> {
    let d = v[0].len();
    let ad = hull::affine_frame(v, QUAD_TOL).dim();
    if ad < d {
        return Err(Error::DegenerateBody { affine_dim: ad, dim: d });
    }
    let keep = hull::extreme_indices(v, QUAD_TOL);
    let v: Vec<Vec<f64>> = keep.into_iter().map(|i| v[i].clone()).collect();
    match d {
        1 => {
            let lo = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let (x, w) = gauss_legendre_on(order, lo, hi);
            for (xi, wi) in x.into_iter().zip(w) {
                out.push(vec![xi], wi);
            }
        }
        2 | 3 => {
            if let Some((p0, edges)) = parallelotope_frame(&v) {
                tensor_parallelotope(out, &p0, &edges, order);
            } else if d == 2 {
                let h = hull::hull2d(&v, QUAD_TOL);
                for k in 1..h.len() - 1 {
                    triangle_rule(out, &v[h[0]], &v[h[k]], &v[h[k + 1]], order);
                }
            } else {
                let c: Vec<f64> = (0..3)
                    .map(|k| v.iter().map(|p| p[k]).sum::<f64>() / v.len() as f64)
                    .collect();
                for f in hull::hull3d(&v, QUAD_TOL) {
                    tetra_rule(out, &c, &v[f[0]], &v[f[1]], &v[f[2]], order);
                }
            }
        }
        other => return Err(Error::UnsupportedDimension(other)),
    }
    Ok(())
}

fn ball_rule(out: &mut RuleBuilder, center: &[f64], radius: f64, order: usize) -> Result<()> {
    let d = center.len();
    if radius <= 0.0 {
        return Err(Error::DegenerateBody { affine_dim: 0, dim: d });
    }
    match d {
        1 => {
            let (x, w) = gauss_legendre_on(order, center[0] - radius, center[0] + radius);
            for (xi, wi) in x.into_iter().zip(w) {
                out.push(vec![xi], wi);
            }
        }
        2 => {
            let (r, wr) = gauss_legendre_on(order, 0.0, radius);
            let na = 2 * order;
            for (ri, wri) in r.iter().zip(&wr) {
                for k in 0..na {
                    let t = 2.0 * PI * k as f64 / na as f64;
                    out.push(
                        vec![center[0] + ri * t.cos(), center[1] + ri * t.sin()],
                        wri * ri * 2.0 * PI / na as f64,
                    );
                }
            }
        }
        3 => {
            let (r, wr) = gauss_legendre_on(order, 0.0, radius);
            let (ct, wc) = gauss_legendre(order);
            let na = 2 * order;
            for (ri, wri) in r.iter().zip(&wr) {
                for (c, wci) in ct.iter().zip(&wc) {
                    let s = (1.0 - c * c).sqrt();
                    for k in 0..na {
                        let t = 2.0 * PI * k as f64 / na as f64;
                        out.push(
                            vec![
                                center[0] + ri * s * t.cos(),
                                center[1] + ri * s * t.sin(),
                                center[2] + ri * c,
                            ],
                            wri * ri * ri * wci * 2.0 * PI / na as f64,
                        );
                    }
                }
            }
        }
        other => return Err(Error::UnsupportedDimension(other)),
    }
    Ok(())
}

/// Builds a positive-weight rule whose weights sum to the volume of `body`.
pub fn build_quadrature(body: &ConvexBody, order: usize) -> Result<Quadrature> {
    if body.is_empty() {
        return Err(Error::EmptyBody);
    }
    let d = body.dim();
    if d == 0 || d > 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive".into()));
    }
    let mut out = RuleBuilder {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    match body.kind() {
        BodyKind::Ball { center, radius } => ball_rule(&mut out, center, *radius, order)?,
        _ => {
            let poly = body
                .as_polytope()
                .ok_or(Error::UnsupportedBody("quadrature on a Minkowski sum with a ball"))?;
            polytope_rule(&mut out, poly.vertices().unwrap_or(&[]), order)?;
        }
    }
    Ok(Quadrature {
        nodes: out.nodes,
        weights: out.weights,
        body: body.clone(),
        order,
    })
}
