//! Polynomials in `ζ̄` (term prefactors) and on the dual space `F′`.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Polynomial in `ζ̄ = (ζ̄_1, …, ζ̄_n)` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl ConjPoly {
    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(vec![0; n], c);
        }
        Self { n, terms }
    }

    /// `c + Σ a_i ζ̄_i`.
    pub fn affine(c: Complex64, a: &[Complex64]) -> Self {
        let n = a.len();
        let mut p = Self::constant(n, c);
        for (i, ai) in a.iter().enumerate() {
            if *ai != Complex64::new(0.0, 0.0) {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, *ai);
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&vec![0; self.n])
                .is_some_and(|c| *c == Complex64::new(1.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn mul(&self, other: &ConjPoly) -> ConjPoly {
        let mut terms: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        ConjPoly { n: self.n, terms }
    }

    pub fn add(&self, other: &ConjPoly) -> ConjPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        out
    }

    pub fn scale(&self, s: Complex64) -> ConjPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        out
    }

    /// `∂/∂ζ̄_i`.
    pub fn partial(&self, i: usize) -> ConjPoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                terms.insert(e2, c * e[i] as f64);
            }
        }
        ConjPoly { n: self.n, terms }
    }

    /// `P(ζ̄ - ζ̄₀)`.
    pub fn shift(&self, zeta0: &[Complex64]) -> ConjPoly {
        let mut out = ConjPoly {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let mut acc = ConjPoly::constant(self.n, *c);
            for (i, &k) in e.iter().enumerate() {
                let mut a = vec![Complex64::new(0.0, 0.0); self.n];
                a[i] = Complex64::new(1.0, 0.0);
                let lin = ConjPoly::affine(-zeta0[i].conj(), &a);
                for _ in 0..k {
                    acc = acc.mul(&lin);
                }
            }
            for (e2, c2) in acc.terms {
                *out.terms.entry(e2).or_insert(Complex64::new(0.0, 0.0)) += c2;
            }
        }
        out.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        out
    }

    /// `P(t ζ̄)` for real `t`.
    pub fn dilate(&self, t: f64) -> ConjPoly {
        let mut out = self.clone();
        for (e, c) in out.terms.iter_mut() {
            *c *= t.powi(e.iter().sum::<u32>() as i32);
        }
        out
    }

    pub fn eval(&self, zeta: &[Complex64]) -> Complex64 {
        if self.is_one() {
            return Complex64::new(1.0, 0.0);
        }
        let conj: Vec<Complex64> = zeta.iter().map(|z| z.conj()).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for (zi, &k) in conj.iter().zip(e) {
                    if k > 0 {
                        v *= zi.powu(k);
                    }
                }
                v
            })
            .sum()
    }
}

/// Polynomial on `F′` (in `λ`).
#[derive(Debug, Clone, PartialEq)]
pub struct FPoly {
    m: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl FPoly {
    pub fn constant(m: usize, c: Complex64) -> Self {
        Self {
            m,
            terms: vec![(vec![0; m], c)],
        }
    }

    /// `⟨λ, v⟩` times `c`.
    pub fn linear(v: &[f64], c: Complex64) -> Self {
        let m = v.len();
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, vi)| **vi != 0.0)
            .map(|(j, vi)| {
                let mut e = vec![0; m];
                e[j] = 1;
                (e, c * *vi)
            })
            .collect();
        Self { m, terms }
    }

    /// The symbol `i⟨λ, v⟩` of the directional derivative `∂_v` along `F`.
    pub fn directional(v: &[f64]) -> Self {
        Self::linear(v, Complex64::new(0.0, 1.0))
    }

    /// Single monomial `c λ^e`.
    pub fn monomial(e: Vec<u32>, c: Complex64) -> Self {
        Self {
            m: e.len(),
            terms: vec![(e, c)],
        }
    }

    pub fn from_terms(m: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Self {
        Self { m, terms }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn eval(&self, lambda: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for (l, &k) in lambda.iter().zip(e) {
                    v *= l.powi(k as i32);
                }
                v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn affine_product_and_partial() {
        let p = ConjPoly::affine(c(1.0, 0.0), &[c(2.0, 0.0)]);
        let sq = p.mul(&p);
        assert_eq!(sq.degree(), 2);
        let z = [c(0.3, 0.4)];
        let expect = (c(1.0, 0.0) + c(2.0, 0.0) * z[0].conj()).powu(2);
        assert!((sq.eval(&z) - expect).norm() < 1e-14);
        let d = sq.partial(0);
        let expect = c(4.0, 0.0) * (c(1.0, 0.0) + c(2.0, 0.0) * z[0].conj());
        assert!((d.eval(&z) - expect).norm() < 1e-14);
        assert!(ConjPoly::one(1).partial(0).is_zero());
    }

    #[test]
    fn shift_and_dilate() {
        let p = ConjPoly::affine(c(0.5, 0.0), &[c(1.0, -1.0), c(0.0, 2.0)]).mul(&ConjPoly::affine(
            c(0.0, 1.0),
            &[c(0.0, 0.0), c(3.0, 0.0)],
        ));
        let z0 = [c(0.2, -0.7), c(1.1, 0.3)];
        let z = [c(-0.4, 0.9), c(0.6, 0.1)];
        let diff: Vec<Complex64> = z.iter().zip(&z0).map(|(a, b)| a - b).collect();
        assert!((p.shift(&z0).eval(&z) - p.eval(&diff)).norm() < 1e-13);
        let scaled: Vec<Complex64> = z.iter().map(|a| a * 1.7).collect();
        assert!((p.dilate(1.7).eval(&z) - p.eval(&scaled)).norm() < 1e-13);
    }

    #[test]
    fn fpoly_symbols() {
        let d = FPoly::directional(&[2.0]);
        assert_eq!(d.eval(&[3.0]), c(0.0, 6.0));
        let sq = FPoly::monomial(vec![2], c(1.0, 0.0));
        assert_eq!(sq.eval(&[-0.5]), c(0.25, 0.0));
        assert_eq!(FPoly::constant(2, c(3.0, 0.0)).eval(&[1.0, 2.0]), c(3.0, 0.0));
    }
}
