//! Band-limited CR functions as finite sums of coherent exponentials.
//!
//! Each term has the form `a · P(ζ̄) · exp(i⟨μ, z⟩ + β·ζ)` on `E × F_C`;
//! on the manifold `z = x + iΦ(ζ)`, so a fresh term restricts to
//! `a · exp(i⟨μ, x⟩ - ⟨μ, Φ(ζ)⟩)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::SpectralDensity;
use super::poly::{ConjPoly, FPoly};
use super::quadrature::Quadrature;
use crate::convexgeom::ConvexBody;
use crate::crgroup::{ComplexPoint, GroupElement, GroupSpec};
use crate::error::{Error, Result};

/// Which synthesis normalization produced the function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Nilpotent,
    Abelian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub mu: Vec<f64>,
    pub coef: Complex64,
    pub beta: Vec<Complex64>,
    pub prefactor: ConjPoly,
    /// Quadrature weight of the originating node.
    pub weight: f64,
}

impl Term {
    pub fn is_plain(&self) -> bool {
        self.prefactor.is_one() && self.beta.iter().all(|b| *b == Complex64::new(0.0, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedFunction {
    pub(crate) spec: GroupSpec,
    pub(crate) terms: Vec<Term>,
    pub(crate) route: Route,
    pub(crate) body: ConvexBody,
}

/// Synthesis constant `2^{n-m} / π^{n+m}`; equals `(2π)^{-m}` when `n = 0`.
pub fn synthesis_constant(n: usize, m: usize) -> f64 {
    2f64.powi(n as i32 - m as i32) / PI.powi((n + m) as i32)
}

fn cone_tolerance(lambda: &[f64]) -> f64 {
    1e-10 * lambda.iter().map(|l| l.abs()).fold(1.0, f64::max)
}

fn check_nodes(spec: &GroupSpec, nodes: &[Vec<f64>]) -> Result<()> {
    if spec.n() == 0 {
        return Ok(());
    }
    for (index, l) in nodes.iter().enumerate() {
        if spec.min_eigenvalue(l) < -cone_tolerance(l) {
            return Err(Error::NodeOutsideCone { index });
        }
    }
    Ok(())
}

fn mat_vec(a: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|k| a[(i, k)] * v[k]).sum())
        .collect()
}

fn mat_t_vec(a: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..a.ncols())
        .map(|k| (0..a.nrows()).map(|i| a[(i, k)] * v[i]).sum())
        .collect()
}

fn pairing(mu: &[f64], z: &[Complex64]) -> Complex64 {
    mu.iter().zip(z).map(|(m, zz)| zz * *m).sum()
}

fn permanent(g: &[Vec<Complex64>]) -> Complex64 {
    // Ryser's formula.
    let k = g.len();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 1usize..(1 << k) {
        let mut prod = Complex64::new(1.0, 0.0);
        for row in g {
            let s: Complex64 = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| row[j]).sum();
            prod *= s;
        }
        let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

impl BandlimitedFunction {
    /// Discretized synthesis `c Σ_q w_q g(λ_q) |Pf(λ_q)| ψ_{λ_q}`.
    pub fn synthesize(spec: &GroupSpec, density: &SpectralDensity) -> Result<Self> {
        let quad = &density.quad;
        if quad.dim() != spec.m() {
            return Err(Error::DimensionMismatch {
                expected: spec.m(),
                found: quad.dim(),
            });
        }
        check_nodes(spec, &quad.nodes)?;
        let c = synthesis_constant(spec.n(), spec.m());
        let zero_beta = vec![Complex64::new(0.0, 0.0); spec.n()];
        let terms = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .zip(&density.values)
            .map(|((l, w), g)| {
                let pf = spec.pfaffian_abs(l).value.abs();
                Term {
                    mu: l.clone(),
                    coef: g * (c * w * pf),
                    beta: zero_beta.clone(),
                    prefactor: ConjPoly::one(spec.n()),
                    weight: *w,
                }
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            terms,
            route: if spec.n() == 0 {
                Route::Abelian
            } else {
                Route::Nilpotent
            },
            body: quad.body.clone(),
        })
    }

    /// The section `K(·, q)` of the reproducing kernel, discretized on `quad`.
    pub fn kernel_section(spec: &GroupSpec, quad: &Quadrature, q: &ComplexPoint) -> Result<Self> {
        check_nodes(spec, &quad.nodes)?;
        let c = synthesis_constant(spec.n(), spec.m());
        let conj_zeta: Vec<Complex64> = q.zeta.iter().map(|z| z.conj()).collect();
        let conj_z: Vec<Complex64> = q.z.iter().map(|z| z.conj()).collect();
        let i = Complex64::new(0.0, 1.0);
        let terms = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(l, w)| {
                let pf = spec.pfaffian_abs(l).value.abs();
                let a = spec.phi_lambda_matrix(l);
                let beta = mat_t_vec(&a, &conj_zeta).iter().map(|b| b * 2.0).collect();
                Term {
                    mu: l.clone(),
                    coef: (-i * pairing(l, &conj_z)).exp() * (c * w * pf),
                    beta,
                    prefactor: ConjPoly::one(spec.n()),
                    weight: *w,
                }
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            terms,
            route: if spec.n() == 0 {
                Route::Abelian
            } else {
                Route::Nilpotent
            },
            body: quad.body.clone(),
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// The body carrying the spectrum.
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn norm_constant(&self) -> f64 {
        synthesis_constant(self.spec.n(), self.spec.m())
    }

    pub fn is_prefactor_free(&self) -> bool {
        self.terms.iter().all(|t| t.is_plain())
    }

    /// Holomorphic evaluation at `(ζ, z) ∈ E × F_C`.
    pub fn evaluate(&self, p: &ComplexPoint) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.terms
            .iter()
            .map(|t| {
                let beta: Complex64 = t.beta.iter().zip(&p.zeta).map(|(b, z)| b * z).sum();
                let pre = t.prefactor.eval(&p.zeta);
                t.coef * pre * (i * pairing(&t.mu, &p.z) + beta).exp()
            })
            .sum()
    }

    /// `f_h(ζ, x) = f(ζ, x + iΦ(ζ) + ih)`.
    pub fn evaluate_slice(&self, g: &GroupElement, h: &[f64]) -> Complex64 {
        self.evaluate(&ComplexPoint::embed(&self.spec, g, h))
    }

    /// `P(-i∂_F)^k f`: multiplies each term by `P(μ)^k`.
    pub fn apply_poly_derivative(&self, p: &FPoly, k: u32) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= p.eval(&t.mu).powu(k);
        }
        out
    }

    /// `Z_w f` or, when `conjugated`, `Z̄_w f`.
    pub fn apply_z(&self, w: &[Complex64], conjugated: bool) -> Result<Self> {
        let n = self.spec.n();
        if n == 0 {
            return Err(Error::NoComplexDirections);
        }
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            if conjugated {
                let mut acc = ConjPoly::constant(n, Complex64::new(0.0, 0.0));
                for (i, wi) in w.iter().enumerate() {
                    let d = t.prefactor.partial(i).scale(wi.conj());
                    acc = acc.add(&d);
                }
                t.prefactor = acc;
            } else {
                let a = self.spec.phi_lambda_matrix(&t.mu);
                let aw: Vec<Complex64> = mat_vec(&a, w).iter().map(|v| v * -2.0).collect();
                let bw: Complex64 = t.beta.iter().zip(w).map(|(b, wi)| b * wi).sum();
                t.prefactor = t.prefactor.mul(&ConjPoly::affine(bw, &aw));
            }
        }
        Ok(out)
    }

    fn plain_weight(&self, t: &Term) -> f64 {
        self.norm_constant() * t.weight * self.spec.pfaffian_abs(&t.mu).value.abs()
    }

    /// Plancherel norm `‖f₀‖₂`, optionally of `Z_v^k f`.
    pub fn spectral_l2_norm(&self, zpower: Option<(&[Complex64], usize)>) -> Result<f64> {
        if !self.is_prefactor_free() {
            return Err(Error::PrefactorPresent);
        }
        if let Some((v, _)) = zpower {
            if self.spec.n() == 0 {
                return Err(Error::NoComplexDirections);
            }
            if v.len() != self.spec.n() {
                return Err(Error::DimensionMismatch {
                    expected: self.spec.n(),
                    found: v.len(),
                });
            }
        }
        let mut total = 0.0;
        for t in &self.terms {
            let a2 = t.coef.norm_sqr();
            if a2 == 0.0 {
                continue;
            }
            let mut s = a2 / self.plain_weight(t);
            if let Some((v, k)) = zpower {
                let form = self.spec.lambda_form(&t.mu, v, v).re;
                s *= 2f64.powi(k as i32) * factorial(k) * form.powi(k as i32);
            }
            total += s;
        }
        Ok(total.sqrt())
    }

    /// Plancherel norm of `Z_{v_1} ⋯ Z_{v_k} f` via `2^k perm(Φ_λ(v_i, v_j))`.
    pub fn spectral_z_norm(&self, vs: &[Vec<Complex64>]) -> Result<f64> {
        if !self.is_prefactor_free() {
            return Err(Error::PrefactorPresent);
        }
        if self.spec.n() == 0 && !vs.is_empty() {
            return Err(Error::NoComplexDirections);
        }
        let k = vs.len();
        let mut total = 0.0;
        for t in &self.terms {
            let a2 = t.coef.norm_sqr();
            if a2 == 0.0 {
                continue;
            }
            let g: Vec<Vec<Complex64>> = vs
                .iter()
                .map(|vi| vs.iter().map(|vj| self.spec.lambda_form(&t.mu, vi, vj)).collect())
                .collect();
            total += a2 / self.plain_weight(t) * 2f64.powi(k as i32) * permanent(&g).re;
        }
        Ok(total.max(0.0).sqrt())
    }

    /// Plancherel inner product `⟨f₀, g₀⟩` of two prefactor-free functions on the same nodes.
    pub fn spectral_inner(&self, other: &Self) -> Result<Complex64> {
        if !self.is_prefactor_free() || !other.is_prefactor_free() {
            return Err(Error::PrefactorPresent);
        }
        if self.terms.len() != other.terms.len()
            || self
                .terms
                .iter()
                .zip(&other.terms)
                .any(|(a, b)| a.mu != b.mu || a.weight != b.weight)
        {
            return Err(Error::QuadratureMismatch);
        }
        Ok(self
            .terms
            .iter()
            .zip(&other.terms)
            .filter(|(a, _)| a.coef != Complex64::new(0.0, 0.0))
            .map(|(a, b)| a.coef * b.coef.conj() / self.plain_weight(a))
            .sum())
    }

    /// `g ↦ f(g₀⁻¹ g)`.
    pub fn translate(&self, g0: &GroupElement) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let conj0: Vec<Complex64> = g0.zeta.iter().map(|z| z.conj()).collect();
        let phi0 = self.spec.phi(&g0.zeta);
        let mut out = self.clone();
        for t in &mut out.terms {
            let a = self.spec.phi_lambda_matrix(&t.mu);
            let shift = mat_t_vec(&a, &conj0);
            let b0: Complex64 = t.beta.iter().zip(&g0.zeta).map(|(b, z)| b * z).sum();
            let mx: f64 = t.mu.iter().zip(&g0.x).map(|(m, x)| m * x).sum();
            let mp: f64 = t.mu.iter().zip(&phi0).map(|(m, p)| m * p).sum();
            t.coef *= (-b0 - i * mx - mp).exp();
            for (b, s) in t.beta.iter_mut().zip(shift) {
                *b += s * 2.0;
            }
            t.prefactor = t.prefactor.shift(&g0.zeta);
        }
        out
    }

    /// `g ↦ f(t · g)`.
    pub fn dilate_argument(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveScale(t));
        }
        let mut out = self.clone();
        let wscale = t.powi(2 * self.spec.m() as i32);
        for term in &mut out.terms {
            term.mu.iter_mut().for_each(|m| *m *= t * t);
            term.beta.iter_mut().for_each(|b| *b *= t);
            term.prefactor = term.prefactor.dilate(t);
            term.weight *= wscale;
        }
        let verts = out.body.as_polytope().and_then(|p| {
            p.vertices()
                .map(|v| v.iter().map(|x| x.iter().map(|c| c * t * t).collect()).collect::<Vec<Vec<f64>>>())
        });
        if let Some(v) = verts {
            out.body = ConvexBody::polytope(v)?;
        }
        Ok(out)
    }

    /// Pointwise product with `exp(i⟨λ, z⟩)`; the node weights stay attached
    /// to the original nodes.
    pub(crate) fn shift_frequencies(&self, lambda: &[f64]) -> Result<Self> {
        if lambda.len() != self.spec.m() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.m(),
                found: lambda.len(),
            });
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            for (m, l) in t.mu.iter_mut().zip(lambda) {
                *m += l;
            }
        }
        out.body = self.body.translate(lambda)?;
        Ok(out)
    }

    /// Zeroes the terms rejected by `keep`.
    pub(crate) fn filter_terms<F: Fn(&Term) -> bool>(&self, keep: F) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            if !keep(t) {
                t.coef = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// The zero function on the same nodes.
    pub fn zeroed(&self) -> Self {
        self.filter_terms(|_| false)
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coef == Complex64::new(0.0, 0.0) || t.prefactor.is_zero())
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Evaluates `K(p, q)` on the nodes of `quad`.
pub fn kernel_eval(
    spec: &GroupSpec,
    body: &ConvexBody,
    p: &ComplexPoint,
    q: &ComplexPoint,
    quad: &Quadrature,
) -> Result<Complex64> {
    if body.dim() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            found: body.dim(),
        });
    }
    Ok(BandlimitedFunction::kernel_section(spec, quad, q)?.evaluate(p))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::crgroup::random_element;
    use crate::presets::GroupPreset;
    use crate::spectral::density::DensitySpec;
    use crate::spectral::quadrature::build_quadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn synth(spec: &GroupSpec, body: ConvexBody, order: usize, d: DensitySpec) -> BandlimitedFunction {
        let q = Arc::new(build_quadrature(&body, order).unwrap());
        BandlimitedFunction::synthesize(spec, &d.build(q, Some(1)).unwrap()).unwrap()
    }

    fn heis_flat() -> BandlimitedFunction {
        synth(
            &GroupPreset::Heisenberg.spec(),
            ConvexBody::interval(1.0, 2.0).unwrap(),
            24,
            DensitySpec::Constant(c(1.0, 0.0)),
        )
    }

    fn single_node(lambda: f64) -> BandlimitedFunction {
        let mut f = heis_flat();
        f.terms.truncate(1);
        f.terms[0].mu = vec![lambda];
        f.terms[0].coef = c(1.0, 0.0);
        f
    }

    fn el(z: Complex64, x: f64) -> GroupElement {
        GroupElement::new(vec![z], vec![x])
    }

    #[test]
    fn abelian_sinc() {
        let kappa = 1.3;
        let f = synth(
            &GroupPreset::Abelian1d.spec(),
            ConvexBody::interval(-kappa, kappa).unwrap(),
            64,
            DensitySpec::Constant(c(1.0, 0.0)),
        );
        assert_eq!(f.route(), Route::Abelian);
        let v0 = f.evaluate_slice(&GroupElement::new(vec![], vec![0.0]), &[0.0]);
        assert!((v0.re - kappa / PI).abs() < 1e-12 && v0.im.abs() < 1e-14);
        for x in [0.7, -3.0, 11.0] {
            let v = f.evaluate_slice(&GroupElement::new(vec![], vec![x]), &[0.0]);
            assert!((v - c((kappa * x).sin() / (PI * x), 0.0)).norm() < 1e-10);
        }
        // Holomorphic extension: sin(κz)/(πz) at z = 0.5 + 0.8i.
        let z = c(0.5, 0.8);
        let v = f.evaluate(&ComplexPoint::new(vec![], vec![z]));
        assert!((v - (z * kappa).sin() / (z * PI)).norm() < 1e-10);
        let d = f.apply_poly_derivative(&FPoly::directional(&[1.0]), 1);
        assert!(d.evaluate(&ComplexPoint::new(vec![], vec![c(0.0, 0.0)])).norm() < 1e-14);
    }

    #[test]
    fn coherent_exponential_values() {
        let psi = single_node(1.0);
        assert_eq!(psi.evaluate_slice(&el(c(0.0, 0.0), 0.0), &[0.0]), c(1.0, 0.0));
        let v = psi.evaluate_slice(&el(c(1.0, 0.0), 0.0), &[0.0]);
        assert!((v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        let f = heis_flat();
        let g = el(c(0.3, -0.4), 1.7);
        let phi = f.spec().phi(&g.zeta)[0];
        let direct = f.evaluate(&ComplexPoint::new(g.zeta.clone(), vec![c(g.x[0], phi)]));
        assert_eq!(f.evaluate_slice(&g, &[0.0]), direct);
    }

    #[test]
    fn zero_density() {
        let f = synth(
            &GroupPreset::Heisenberg.spec(),
            ConvexBody::interval(1.0, 2.0).unwrap(),
            8,
            DensitySpec::Constant(c(0.0, 0.0)),
        );
        assert_eq!(f.evaluate_slice(&el(c(0.2, 0.1), 0.3), &[0.0]), c(0.0, 0.0));
        assert_eq!(f.spectral_l2_norm(None).unwrap(), 0.0);
    }

    #[test]
    fn node_outside_cone() {
        let q = Arc::new(build_quadrature(&ConvexBody::interval(-1.0, 1.0).unwrap(), 4).unwrap());
        let d = SpectralDensity::constant(q, c(1.0, 0.0)).unwrap();
        assert!(matches!(
            BandlimitedFunction::synthesize(&GroupPreset::Heisenberg.spec(), &d),
            Err(Error::NodeOutsideCone { .. })
        ));
    }

    #[test]
    fn poly_derivative_against_finite_difference() {
        let spec = GroupPreset::Heisenberg.spec();
        let f = synth(
            &spec,
            ConvexBody::interval(1.0, 2.0).unwrap(),
            24,
            DensitySpec::GaussianBump {
                center: vec![1.5],
                width: 0.2,
            },
        );
        let cube = f.apply_poly_derivative(&FPoly::linear(&[1.0], c(1.0, 0.0)), 3);
        for (a, b) in f.terms.iter().zip(&cube.terms) {
            assert!((b.coef - a.coef * a.mu[0].powi(3)).norm() <= 1e-14 * b.coef.norm().max(1e-300));
        }
        let d = f.apply_poly_derivative(&FPoly::directional(&[1.0]), 1);
        let g = el(c(0.4, 0.2), 0.9);
        let hstep = 1e-5;
        let fd = (f.evaluate_slice(&el(g.zeta[0], g.x[0] + hstep), &[0.0])
            - f.evaluate_slice(&el(g.zeta[0], g.x[0] - hstep), &[0.0]))
            / (2.0 * hstep);
        let exact = d.evaluate_slice(&g, &[0.0]);
        assert!((fd - exact).norm() < 1e-6 * exact.norm());
        let two = f
            .apply_poly_derivative(&FPoly::directional(&[1.0]), 1)
            .apply_poly_derivative(&FPoly::directional(&[1.0]), 2);
        let three = f.apply_poly_derivative(&FPoly::directional(&[1.0]), 3);
        for (a, b) in two.terms.iter().zip(&three.terms) {
            assert!((a.coef - b.coef).norm() <= 1e-15 * b.coef.norm());
        }
    }

    /// `Z_w = ½(∂_w - i∂_{iw}) + iΦ(w, ζ)∂_F`, by central differences on the slice `h = 0`.
    fn z_fd(f: &BandlimitedFunction, w: &[Complex64], g: &GroupElement) -> Complex64 {
        let h = 1e-5;
        let spec = f.spec();
        let at = |dz: &[Complex64], dx: &[f64]| {
            let gz: Vec<Complex64> = g.zeta.iter().zip(dz).map(|(a, b)| a + b).collect();
            let gx: Vec<f64> = g.x.iter().zip(dx).map(|(a, b)| a + b).collect();
            f.evaluate_slice(&GroupElement::new(gz, gx), &vec![0.0; spec.m()])
        };
        let zero_x = vec![0.0; spec.m()];
        let zero_z = vec![c(0.0, 0.0); spec.n()];
        let dir = |v: &[Complex64]| {
            let p: Vec<Complex64> = v.iter().map(|a| a * h).collect();
            let m: Vec<Complex64> = v.iter().map(|a| -a * h).collect();
            (at(&p, &zero_x) - at(&m, &zero_x)) / (2.0 * h)
        };
        let iw: Vec<Complex64> = w.iter().map(|a| a * c(0.0, 1.0)).collect();
        let wirt = (dir(w) - c(0.0, 1.0) * dir(&iw)) * 0.5;
        let phi = spec.phi_sesq(w, &g.zeta);
        let dfx = |v: &[f64]| {
            let p: Vec<f64> = v.iter().map(|a| a * h).collect();
            let m: Vec<f64> = v.iter().map(|a| -a * h).collect();
            (at(&zero_z, &p) - at(&zero_z, &m)) / (2.0 * h)
        };
        let re: Vec<f64> = phi.iter().map(|p| p.re).collect();
        let im: Vec<f64> = phi.iter().map(|p| p.im).collect();
        wirt + c(0.0, 1.0) * dfx(&re) - dfx(&im)
    }

    #[test]
    fn heisenberg_z_value() {
        let psi = single_node(1.0);
        let z = psi.apply_z(&[c(1.0, 0.0)], false).unwrap();
        let v = z.evaluate_slice(&el(c(1.0, 0.0), 0.0), &[0.0]);
        assert!((v - c(-2.0 * (-1.0f64).exp(), 0.0)).norm() < 1e-15);
        let fd = z_fd(&psi, &[c(1.0, 0.0)], &el(c(1.0, 0.0), 0.0));
        assert!((fd - v).norm() < 1e-6 * v.norm());
    }

    #[test]
    fn z_fields_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for preset in [GroupPreset::Heisenberg, GroupPreset::Example110b, GroupPreset::Example110a] {
            let spec = preset.spec();
            let body = if spec.m() == 1 {
                ConvexBody::interval(1.0, 2.0).unwrap()
            } else {
                ConvexBody::boxed(&[1.0, 1.0], &[1.5, 1.8]).unwrap()
            };
            let f = synth(&spec, body, 6, DensitySpec::Random { seed: Some(2), count: 3 });
            for _ in 0..5 {
                let g = random_element(&spec, &mut rng, 0.8);
                let w: Vec<Complex64> = (0..spec.n())
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let exact = f.apply_z(&w, false).unwrap();
                let v = exact.evaluate_slice(&g, &vec![0.0; spec.m()]);
                let fd = z_fd(&f, &w, &g);
                assert!((fd - v).norm() < 1e-6 * v.norm().max(1e-3), "{preset:?}");
                // Second application against differences of the first.
                let twice = exact.apply_z(&w, false).unwrap();
                let v2 = twice.evaluate_slice(&g, &vec![0.0; spec.m()]);
                let fd2 = z_fd(&exact, &w, &g);
                assert!((fd2 - v2).norm() < 1e-5 * v2.norm().max(1e-3), "{preset:?}");
                // Z̄ kills CR functions; on prefactors it differentiates in ζ̄.
                let zb = f.apply_z(&w, true).unwrap();
                assert!(zb.evaluate_slice(&g, &vec![0.0; spec.m()]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn z_twice_is_squared_factor() {
        let psi = single_node(1.3);
        let w = [c(0.6, -0.2)];
        let z2 = psi.apply_z(&w, false).unwrap().apply_z(&w, false).unwrap();
        let g = el(c(0.4, 0.9), -0.3);
        let factor = psi.spec().lambda_form(&[1.3], &w, &g.zeta) * -2.0;
        let expect = factor * factor * psi.evaluate_slice(&g, &[0.0]);
        assert!((z2.evaluate_slice(&g, &[0.0]) - expect).norm() < 1e-14);
    }

    #[test]
    fn cr_residual_random_probes() {
        let spec = GroupPreset::Heisenberg.spec();
        let f = heis_flat();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zb = f.apply_z(&[c(0.3, 0.8)], true).unwrap();
        for _ in 0..100 {
            let g = random_element(&spec, &mut rng, 3.0);
            assert!(zb.evaluate_slice(&g, &[0.0]).norm() < 1e-10);
        }
        assert!(zb.is_zero());
        let ab = synth(
            &GroupPreset::Abelian1d.spec(),
            ConvexBody::interval(-1.0, 1.0).unwrap(),
            4,
            DensitySpec::Constant(c(1.0, 0.0)),
        );
        assert_eq!(ab.apply_z(&[], false), Err(Error::NoComplexDirections));
    }

    #[test]
    fn plancherel_closed_forms() {
        let f = heis_flat();
        let n2 = f.spectral_l2_norm(None).unwrap().powi(2);
        assert!((n2 - 1.5 / (PI * PI)).abs() < 1e-14);
        let z2 = f.spectral_l2_norm(Some((&[c(1.0, 0.0)], 1))).unwrap().powi(2);
        assert!((z2 - 14.0 / (3.0 * PI * PI)).abs() < 1e-14);
        let general = f.spectral_z_norm(&vec![vec![c(1.0, 0.0)]; 3]).unwrap();
        let equal = f.spectral_l2_norm(Some((&[c(1.0, 0.0)], 3))).unwrap();
        assert!((general - equal).abs() < 1e-12 * equal);
        let z = f.apply_z(&[c(1.0, 0.0)], false).unwrap();
        assert_eq!(z.spectral_l2_norm(None), Err(Error::PrefactorPresent));
        let inner = f.spectral_inner(&f).unwrap();
        assert!((inner.re - n2).abs() < 1e-14);
    }

    #[test]
    fn kernel_closed_forms() {
        let spec = GroupPreset::Heisenberg.spec();
        let (a, b) = (0.5, 2.5);
        let body = ConvexBody::interval(a, b).unwrap();
        let q = build_quadrature(&body, 16).unwrap();
        let o = ComplexPoint::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]);
        let k = kernel_eval(&spec, &body, &o, &o, &q).unwrap();
        assert!((k - c((b * b - a * a) / (2.0 * PI * PI), 0.0)).norm() < 1e-10);
        let p = ComplexPoint::new(vec![c(0.3, -0.2)], vec![c(0.4, 0.5)]);
        let r = ComplexPoint::new(vec![c(-0.7, 0.1)], vec![c(-1.0, 0.9)]);
        let kpr = kernel_eval(&spec, &body, &p, &r, &q).unwrap();
        let krp = kernel_eval(&spec, &body, &r, &p, &q).unwrap();
        assert!((kpr - krp.conj()).norm() < 1e-12 * kpr.norm());

        let ab = GroupPreset::Abelian1d.spec();
        let kappa = 2.0;
        let body = ConvexBody::interval(-kappa, kappa).unwrap();
        let q = build_quadrature(&body, 64).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, -0.5), (3.0, 0.25)] {
            let p = ComplexPoint::new(vec![], vec![c(x, 0.0)]);
            let r = ComplexPoint::new(vec![], vec![c(y, 0.0)]);
            let t = kappa * (x - y);
            let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
            let k = kernel_eval(&ab, &body, &p, &r, &q).unwrap();
            assert!((k - c(kappa / PI * sinc, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn translation_and_dilation() {
        let spec = GroupPreset::Example110b.spec();
        let f = synth(
            &spec,
            ConvexBody::boxed(&[1.0, 1.0], &[1.5, 2.0]).unwrap(),
            5,
            DensitySpec::Random { seed: Some(9), count: 4 },
        );
        let f = f.apply_z(&[c(0.3, 0.1), c(-0.2, 0.5)], false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let g0 = random_element(&spec, &mut rng, 0.7);
            let g = random_element(&spec, &mut rng, 0.7);
            let moved = f.translate(&g0);
            let arg = spec.multiply(&spec.inverse(&g0), &g).unwrap();
            let expect = f.evaluate_slice(&arg, &[0.0, 0.0]);
            assert!((moved.evaluate_slice(&g, &[0.0, 0.0]) - expect).norm() < 1e-10 * expect.norm().max(1.0));
            let t = 1.4;
            let dil = f.dilate_argument(t).unwrap();
            let expect = f.evaluate_slice(&spec.dilate(t, &g).unwrap(), &[0.0, 0.0]);
            assert!((dil.evaluate_slice(&g, &[0.0, 0.0]) - expect).norm() < 1e-10 * expect.norm().max(1.0));
        }
        let plain = synth(
            &GroupPreset::Heisenberg.spec(),
            ConvexBody::interval(1.0, 2.0).unwrap(),
            8,
            DensitySpec::Constant(c(1.0, 0.0)),
        );
        let t: f64 = 1.7;
        let ratio = plain.dilate_argument(t).unwrap().spectral_l2_norm(None).unwrap()
            / plain.spectral_l2_norm(None).unwrap();
        assert!((ratio - t.powi(-2)).abs() < 1e-12);
    }
}
