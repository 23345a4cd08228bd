//! The quadratic CR group `N = E × F` built from a hermitian map `Φ : E × E → F_C`.
//!
//! `E = C^n`, `F = R^m`. The map is given by `m` hermitian `n × n` matrices
//! `A_j`, with `Φ(a, b)_j = conj(b)ᵀ A_j a` (linear in the first slot,
//! conjugate-linear in the second) and `Φ(ζ) = Φ(ζ, ζ) ∈ R^m`.
//!
//! Group law: `(ζ, x)(ζ', x') = (ζ + ζ', x + x' + 2 Im Φ(ζ, ζ'))`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const HERMITIAN_REJECT: f64 = 1e-9;

/// Default threshold for strict membership in the positivity cone.
pub const DEFAULT_EPS_PD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    n: usize,
    m: usize,
    a: Vec<DMatrix<Complex64>>,
}

/// A point `(ζ, x)` of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub zeta: Vec<Complex64>,
    pub x: Vec<f64>,
}

/// A point `(ζ, z)` of `E × F_C`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint {
    pub zeta: Vec<Complex64>,
    pub z: Vec<Complex64>,
}

/// Determinant of the form `⟨λ, Φ⟩`, with a flag raised when the form is
/// not positive semi-definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pfaffian {
    pub value: f64,
    pub non_positive_form: bool,
}

impl GroupElement {
    pub fn new(zeta: Vec<Complex64>, x: Vec<f64>) -> Self {
        Self { zeta, x }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            zeta: vec![Complex64::new(0.0, 0.0); n],
            x: vec![0.0; m],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.zeta.iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && self.x.iter().all(|v| v.is_finite())
    }

    /// Real coordinates `(Re ζ_1, Im ζ_1, …, x_1, …)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.zeta.len() + self.x.len());
        for c in &self.zeta {
            out.push(c.re);
            out.push(c.im);
        }
        out.extend_from_slice(&self.x);
        out
    }

    pub fn from_coords(n: usize, coords: &[f64]) -> Self {
        let zeta = (0..n)
            .map(|i| Complex64::new(coords[2 * i], coords[2 * i + 1]))
            .collect();
        Self {
            zeta,
            x: coords[2 * n..].to_vec(),
        }
    }
}

impl ComplexPoint {
    pub fn new(zeta: Vec<Complex64>, z: Vec<Complex64>) -> Self {
        Self { zeta, z }
    }

    /// The point `(ζ, x + iΦ(ζ) + ih)` on the copy of the CR manifold at height `h`.
    pub fn embed(spec: &GroupSpec, g: &GroupElement, h: &[f64]) -> Self {
        let phi = spec.phi(&g.zeta);
        let z = g
            .x
            .iter()
            .zip(&phi)
            .zip(h)
            .map(|((x, p), hh)| Complex64::new(*x, p + hh))
            .collect();
        Self {
            zeta: g.zeta.clone(),
            z,
        }
    }
}

impl GroupSpec {
    /// Validates and builds the group. Matrices within `1e-9` of hermitian are
    /// symmetrized.
    pub fn new(n: usize, m: usize, a: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if a.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: a.len(),
            });
        }
        let mut out = Vec::with_capacity(m);
        for (index, mat) in a.into_iter().enumerate() {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: mat.nrows().max(mat.ncols()),
                });
            }
            let adj = mat.adjoint();
            let deviation = (&mat - &adj)
                .iter()
                .map(|c| c.norm())
                .fold(0.0_f64, f64::max);
            if !deviation.is_finite() || deviation > HERMITIAN_REJECT {
                return Err(Error::NonHermitian { index, deviation });
            }
            out.push((&mat + &adj).scale(0.5));
        }
        Ok(Self { n, m, a: out })
    }

    /// Builds from row-major `[re, im]` entries.
    pub fn from_entries(n: usize, m: usize, a: &[Vec<Vec<[f64; 2]>>]) -> Result<Self> {
        let mut mats = Vec::with_capacity(a.len());
        for rows in a {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rows.len(),
                });
            }
            mats.push(DMatrix::from_fn(n, n, |i, j| {
                Complex64::new(rows[i][j][0], rows[i][j][1])
            }));
        }
        Self::new(n, m, mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Homogeneous dimension `2n + 2m`.
    pub fn q(&self) -> usize {
        2 * self.n + 2 * self.m
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.a
    }

    pub fn is_abelian(&self) -> bool {
        self.n == 0
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.n, self.m)
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        if g.zeta.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: g.zeta.len(),
            });
        }
        if g.x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: g.x.len(),
            });
        }
        Ok(())
    }

    /// `Φ(a, b)` with components `conj(b)ᵀ A_j a`.
    pub fn phi_sesq(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        self.a
            .iter()
            .map(|mat| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, bi) in b.iter().enumerate() {
                    let mut row = Complex64::new(0.0, 0.0);
                    for (k, ak) in a.iter().enumerate() {
                        row += mat[(i, k)] * ak;
                    }
                    acc += bi.conj() * row;
                }
                acc
            })
            .collect()
    }

    /// `Φ(ζ) = Φ(ζ, ζ)`, real by hermitian symmetry.
    pub fn phi(&self, zeta: &[Complex64]) -> Vec<f64> {
        self.phi_sesq(zeta, zeta).into_iter().map(|c| c.re).collect()
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        self.check_element(h)?;
        let cross = self.phi_sesq(&g.zeta, &h.zeta);
        let zeta = g.zeta.iter().zip(&h.zeta).map(|(a, b)| a + b).collect();
        let x = g
            .x
            .iter()
            .zip(&h.x)
            .zip(&cross)
            .map(|((a, b), c)| a + b + 2.0 * c.im)
            .collect();
        Ok(GroupElement { zeta, x })
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            zeta: g.zeta.iter().map(|c| -c).collect(),
            x: g.x.iter().map(|v| -v).collect(),
        }
    }

    pub fn dilate(&self, t: f64, g: &GroupElement) -> Result<GroupElement> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveScale(t));
        }
        Ok(GroupElement {
            zeta: g.zeta.iter().map(|c| c * t).collect(),
            x: g.x.iter().map(|v| v * t * t).collect(),
        })
    }

    /// Korányi-type homogeneous gauge `(|ζ|⁴ + |x|²)^{1/4}`.
    pub fn gauge(&self, g: &GroupElement) -> f64 {
        let z2: f64 = g.zeta.iter().map(|c| c.norm_sqr()).sum();
        let x2: f64 = g.x.iter().map(|v| v * v).sum();
        (z2 * z2 + x2).sqrt().sqrt()
    }

    /// Left-invariant distance `ρ(g⁻¹ g')`.
    pub fn gauge_distance(&self, g: &GroupElement, h: &GroupElement) -> Result<f64> {
        let rel = self.multiply(&self.inverse(g), h)?;
        Ok(self.gauge(&rel))
    }

    /// Foliation coordinate `Im z − Φ(ζ)`.
    pub fn rho(&self, p: &ComplexPoint) -> Vec<f64> {
        let phi = self.phi(&p.zeta);
        p.z.iter().zip(phi).map(|(z, f)| z.im - f).collect()
    }

    /// `Σ λ_j A_j`.
    pub fn phi_lambda_matrix(&self, lambda: &[f64]) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        for (l, mat) in lambda.iter().zip(&self.a) {
            out += mat.scale(*l);
        }
        out
    }

    /// `Φ_λ(a, b) = ⟨λ, Φ(a, b)⟩`.
    pub fn lambda_form(&self, lambda: &[f64], a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.phi_sesq(a, b)
            .iter()
            .zip(lambda)
            .map(|(c, l)| c * *l)
            .sum()
    }

    pub fn min_eigenvalue(&self, lambda: &[f64]) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        let mat = self.phi_lambda_matrix(lambda);
        SymmetricEigen::new(mat)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Determinant of `⟨λ, Φ⟩`; a polynomial of degree `n` in `λ`.
    pub fn pfaffian_abs(&self, lambda: &[f64]) -> Pfaffian {
        if self.n == 0 {
            return Pfaffian {
                value: 1.0,
                non_positive_form: false,
            };
        }
        let mat = self.phi_lambda_matrix(lambda);
        let value = mat.clone().determinant().re;
        let min_eig = SymmetricEigen::new(mat)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        Pfaffian {
            value,
            non_positive_form: min_eig < -1e-12,
        }
    }

    /// Membership in the open cone `Λ₊`.
    pub fn in_lambda_plus(&self, lambda: &[f64], eps_pd: f64) -> bool {
        self.min_eigenvalue(lambda) > eps_pd
    }

    /// Membership in `Φ(E)°` (positive semi-definite forms), up to `eps`.
    pub fn in_phi_polar(&self, lambda: &[f64], eps: f64) -> bool {
        self.min_eigenvalue(lambda) >= -eps
    }

    /// Largest observed `d(a,c) / (d(a,b) + d(b,c))` over random triples.
    pub fn quasi_triangle_constant(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let a = random_element(self, &mut rng, 2.0);
            let b = random_element(self, &mut rng, 2.0);
            let c = random_element(self, &mut rng, 2.0);
            let ac = self.gauge_distance(&a, &c).unwrap_or(0.0);
            let ab = self.gauge_distance(&a, &b).unwrap_or(0.0);
            let bc = self.gauge_distance(&b, &c).unwrap_or(0.0);
            let denom = ab + bc;
            if denom > 0.0 {
                worst = worst.max(ac / denom);
            }
        }
        worst
    }
}

/// Uniform random element with coordinates in `[-scale, scale]`.
pub fn random_element<R: Rng>(spec: &GroupSpec, rng: &mut R, scale: f64) -> GroupElement {
    let zeta = (0..spec.n())
        .map(|_| {
            Complex64::new(
                rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
            )
        })
        .collect();
    let x = (0..spec.m())
        .map(|_| rng.random_range(-scale..scale))
        .collect();
    GroupElement { zeta, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::GroupPreset;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn heis() -> GroupSpec {
        GroupPreset::Heisenberg.spec()
    }

    #[test]
    fn heisenberg_has_q4() {
        let g = GroupSpec::from_entries(1, 1, &[vec![vec![[1.0, 0.0]]]]).unwrap();
        assert_eq!(g.q(), 4);
    }

    #[test]
    fn diagonal_pair_has_q8() {
        let g = GroupPreset::Example110b.spec();
        assert_eq!(g.q(), 8);
    }

    #[test]
    fn imaginary_scalar_is_rejected() {
        let err = GroupSpec::from_entries(1, 1, &[vec![vec![[0.0, 1.0]]]]).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn wrong_matrix_count_is_rejected() {
        let err = GroupSpec::from_entries(1, 2, &[vec![vec![[1.0, 0.0]]]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let g = GroupSpec::from_entries(
            2,
            1,
            &[vec![
                vec![[1.0, 0.0], [0.5, 1e-11]],
                vec![[0.5, 0.0], [2.0, 0.0]],
            ]],
        )
        .unwrap();
        let a = &g.matrices()[0];
        assert!((a[(0, 1)] - a[(1, 0)].conj()).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_products() {
        let g = heis();
        let e = |z: Complex64, x: f64| GroupElement::new(vec![z], vec![x]);
        let p = g.multiply(&e(c(1.0, 0.0), 0.0), &e(c(0.0, 0.0), 0.0)).unwrap();
        assert_eq!(p, e(c(1.0, 0.0), 0.0));
        let z = e(c(0.3, -1.2), 0.7);
        let p = g.multiply(&z, &g.inverse(&z)).unwrap();
        assert!(p.zeta[0].norm() < 1e-15 && p.x[0].abs() < 1e-15);
        // Φ(1, i) = 1·conj(i) = -i, so 2 Im = -2.
        let p = g.multiply(&e(c(1.0, 0.0), 0.0), &e(c(0.0, 1.0), 0.0)).unwrap();
        assert_eq!(p.zeta[0], c(1.0, 1.0));
        assert!((p.x[0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_negates() {
        let g = heis();
        let inv = g.inverse(&GroupElement::new(vec![c(1.0, 1.0)], vec![3.0]));
        assert_eq!(inv, GroupElement::new(vec![c(-1.0, -1.0)], vec![-3.0]));
        assert_eq!(g.inverse(&g.identity()).x[0], 0.0);
    }

    #[test]
    fn dilation_examples() {
        let g = heis();
        let p = GroupElement::new(vec![c(1.0, 0.0)], vec![1.0]);
        assert_eq!(g.dilate(1.0, &p).unwrap(), p);
        assert_eq!(
            g.dilate(2.0, &p).unwrap(),
            GroupElement::new(vec![c(2.0, 0.0)], vec![4.0])
        );
        assert!(matches!(
            g.dilate(0.0, &p),
            Err(Error::NonPositiveScale(_))
        ));
    }

    #[test]
    fn gauge_examples() {
        let g = heis();
        let a = GroupElement::new(vec![c(0.4, 0.1)], vec![2.0]);
        assert_eq!(g.gauge_distance(&a, &a).unwrap(), 0.0);
        let d = g
            .gauge_distance(&g.identity(), &GroupElement::new(vec![c(0.0, 0.0)], vec![1.0]))
            .unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let k = g.quasi_triangle_constant(10_000, 1);
        assert!(k <= 2.0, "quasi-triangle constant {k}");
    }

    #[test]
    fn rho_examples() {
        let g = heis();
        let p = ComplexPoint::new(vec![c(1.0, 0.0)], vec![c(0.0, 2.0)]);
        assert!((g.rho(&p)[0] - 1.0).abs() < 1e-15);
        let el = GroupElement::new(vec![c(0.7, -0.2)], vec![1.5]);
        let on_m = ComplexPoint::embed(&g, &el, &[0.0]);
        assert!(g.rho(&on_m)[0].abs() < 1e-15);
        let lifted = ComplexPoint::embed(&g, &el, &[0.37]);
        assert!((g.rho(&lifted)[0] - 0.37).abs() < 1e-15);
    }

    #[test]
    fn phi_lambda_and_pfaffian() {
        let h = heis();
        assert_eq!(h.phi_lambda_matrix(&[0.0])[(0, 0)], c(0.0, 0.0));
        assert_eq!(h.phi_lambda_matrix(&[2.0])[(0, 0)], c(2.0, 0.0));
        assert!((h.pfaffian_abs(&[2.0]).value - 2.0).abs() < 1e-14);

        let g = GroupPreset::Example110b.spec();
        let mat = g.phi_lambda_matrix(&[1.0, 3.0]);
        assert_eq!(mat[(0, 0)], c(1.0, 0.0));
        assert_eq!(mat[(1, 1)], c(3.0, 0.0));
        assert_eq!(mat[(0, 1)], c(0.0, 0.0));
        assert!((g.pfaffian_abs(&[2.0, 3.0]).value - 6.0).abs() < 1e-13);
        assert!(g.pfaffian_abs(&[1.0, 0.0]).value.abs() < 1e-15);
        assert!(g.pfaffian_abs(&[1.0, -1.0]).non_positive_form);
    }

    #[test]
    fn cone_membership() {
        let g = GroupPreset::Example110b.spec();
        assert!(g.in_lambda_plus(&[1.0, 1.0], DEFAULT_EPS_PD));
        assert!(!g.in_lambda_plus(&[1.0, 0.0], DEFAULT_EPS_PD));
        assert!(!heis().in_lambda_plus(&[-1.0], DEFAULT_EPS_PD));
        assert!(GroupPreset::Abelian1d.spec().in_lambda_plus(&[-5.0], DEFAULT_EPS_PD));
    }
}
