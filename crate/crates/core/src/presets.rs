//! Named groups used by scenarios and tests.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::crgroup::GroupSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupPreset {
    Abelian1d,
    Heisenberg,
    /// `Φ(ζ) = (|ζ₁|² + |ζ₂|², 0)`.
    Example110a,
    /// `Φ(ζ) = (|ζ₁|², |ζ₂|²)`.
    Example110b,
    /// `Φ(ζ) = (|ζ₁|², Re ζ₁ ζ̄₂)`.
    Example110c,
    /// `Φ(ζ) = (Re ζ₁ ζ̄₂, Im ζ₁ ζ̄₂)`.
    Example110d,
    MatrixR1K1,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(a: [[Complex64; 2]; 2]) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| a[i][j])
}

impl GroupPreset {
    pub const ALL: [GroupPreset; 7] = [
        GroupPreset::Abelian1d,
        GroupPreset::Heisenberg,
        GroupPreset::Example110a,
        GroupPreset::Example110b,
        GroupPreset::Example110c,
        GroupPreset::Example110d,
        GroupPreset::MatrixR1K1,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GroupPreset::Abelian1d => "abelian1d",
            GroupPreset::Heisenberg => "heisenberg",
            GroupPreset::Example110a => "example110a",
            GroupPreset::Example110b => "example110b",
            GroupPreset::Example110c => "example110c",
            GroupPreset::Example110d => "example110d",
            GroupPreset::MatrixR1K1 => "matrix_r1_k1",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.id() == id)
    }

    pub fn lambda_plus_description(self) -> &'static str {
        match self {
            GroupPreset::Abelian1d => "Λ₊ = R (abelian, every λ)",
            GroupPreset::Heisenberg => "Λ₊ = (0, ∞)",
            GroupPreset::Example110a => "Λ₊ = (0, ∞) × R",
            GroupPreset::Example110b => "Λ₊ = (ℝ₊*)²",
            GroupPreset::Example110c => "Λ₊ = ∅",
            GroupPreset::Example110d => "Λ₊ = ∅",
            GroupPreset::MatrixR1K1 => "Λ₊ = positive definite 1×1 hermitian matrices = (0, ∞)",
        }
    }

    /// Whether the positivity cone is empty, which disables sampling and
    /// Paley–Wiener checks.
    pub fn lambda_plus_empty(self) -> bool {
        matches!(self, GroupPreset::Example110c | GroupPreset::Example110d)
    }

    pub fn spec(self) -> GroupSpec {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let half = c(0.5, 0.0);
        let (n, m, a) = match self {
            GroupPreset::Abelian1d => (0, 1, vec![DMatrix::zeros(0, 0)]),
            GroupPreset::Heisenberg | GroupPreset::MatrixR1K1 => {
                (1, 1, vec![DMatrix::from_element(1, 1, one)])
            }
            GroupPreset::Example110a => (
                2,
                2,
                vec![mat2([[one, z], [z, one]]), mat2([[z, z], [z, z]])],
            ),
            GroupPreset::Example110b => (
                2,
                2,
                vec![mat2([[one, z], [z, z]]), mat2([[z, z], [z, one]])],
            ),
            GroupPreset::Example110c => (
                2,
                2,
                vec![mat2([[one, z], [z, z]]), mat2([[z, half], [half, z]])],
            ),
            GroupPreset::Example110d => (
                2,
                2,
                vec![
                    mat2([[z, half], [half, z]]),
                    mat2([[z, c(0.0, 0.5)], [c(0.0, -0.5), z]]),
                ],
            ),
        };
        GroupSpec::new(n, m, a).expect("preset matrices are hermitian")
    }
}

/// Orthonormal basis of `r × r` hermitian matrices for the pairing `tr(xy)`.
fn hermitian_basis(r: usize) -> Vec<DMatrix<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        let mut e = DMatrix::zeros(r, r);
        e[(i, i)] = c(1.0, 0.0);
        out.push(e);
    }
    for i in 0..r {
        for j in i + 1..r {
            let mut e = DMatrix::zeros(r, r);
            e[(i, j)] = c(s, 0.0);
            e[(j, i)] = c(s, 0.0);
            out.push(e);
            let mut e = DMatrix::zeros(r, r);
            e[(i, j)] = c(0.0, s);
            e[(j, i)] = c(0.0, -s);
            out.push(e);
        }
    }
    out
}

/// `E = C^{k×r}`, `F = Herm(r)`, `Φ(ζ) = ζ*ζ`, in coordinates of an
/// orthonormal basis of `Herm(r)`. `ζ` is flattened column-major.
pub fn matrix_space(r: usize, k: usize) -> GroupSpec {
    let n = r * k;
    let basis = hermitian_basis(r);
    let m = basis.len();
    let a = basis
        .iter()
        .map(|b| {
            DMatrix::from_fn(n, n, |row, col| {
                let (ar, br) = (row % k, row / k);
                let (ac, bc) = (col % k, col / k);
                if ar == ac {
                    b[(bc, br)]
                } else {
                    c(0.0, 0.0)
                }
            })
        })
        .collect();
    GroupSpec::new(n, m, a).expect("basis matrices are hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crgroup::DEFAULT_EPS_PD;

    #[test]
    fn ids_round_trip() {
        for p in GroupPreset::ALL {
            assert_eq!(GroupPreset::from_id(p.id()), Some(p));
        }
        assert!(GroupPreset::from_id("nope").is_none());
    }

    #[test]
    fn example_phi_values() {
        let z = [c(1.0, 2.0), c(-0.5, 0.3)];
        let b = GroupPreset::Example110b.spec().phi(&z);
        assert!((b[0] - 5.0).abs() < 1e-14 && (b[1] - 0.34).abs() < 1e-14);
        let prod = z[0] * z[1].conj();
        let cc = GroupPreset::Example110c.spec().phi(&z);
        assert!((cc[1] - prod.re).abs() < 1e-14);
        let d = GroupPreset::Example110d.spec().phi(&z);
        assert!((d[0] - prod.re).abs() < 1e-14 && (d[1] - prod.im).abs() < 1e-14);
    }

    #[test]
    fn empty_cones_have_no_positive_probe() {
        for p in [GroupPreset::Example110c, GroupPreset::Example110d] {
            let g = p.spec();
            for i in 0..64 {
                let t = i as f64 * std::f64::consts::TAU / 64.0;
                assert!(!g.in_lambda_plus(&[t.cos(), t.sin()], DEFAULT_EPS_PD));
            }
        }
        let a = GroupPreset::Example110a.spec();
        assert!(a.in_lambda_plus(&[0.1, -7.0], DEFAULT_EPS_PD));
    }

    #[test]
    fn matrix_space_r1_k1_is_heisenberg() {
        assert_eq!(matrix_space(1, 1), GroupPreset::Heisenberg.spec());
    }

    #[test]
    fn matrix_space_phi_is_gram_matrix() {
        let g = matrix_space(2, 3);
        assert_eq!((g.n(), g.m()), (6, 4));
        let zeta: Vec<Complex64> = (0..6).map(|i| c(i as f64 * 0.3 - 1.0, 0.2 * i as f64)).collect();
        let phi = g.phi(&zeta);
        // (ζ*ζ)_{00} = Σ_a |ζ_{a0}|².
        let g00: f64 = zeta[0..3].iter().map(|v| v.norm_sqr()).sum();
        assert!((phi[0] - g00).abs() < 1e-12);
        // Identity pairing is positive.
        assert!(g.in_lambda_plus(&[1.0, 1.0, 0.0, 0.0], DEFAULT_EPS_PD));
    }
}
