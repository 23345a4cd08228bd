//! Cardinal-series reconstruction on the real line.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::crgroup::GroupElement;
use crate::error::{Error, Result};
use crate::spectral::BandlimitedFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct WksReport {
    pub values: Vec<Complex64>,
    /// `max |series - f|` over the evaluation points.
    pub max_error: f64,
}

/// `sin t / t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn at(f: &BandlimitedFunction, x: f64) -> Complex64 {
    f.evaluate_slice(&GroupElement::new(vec![], vec![x]), &[0.0])
}

/// `Σ_{|k| ≤ N} f(kπ/κ) sinc(κx - kπ)` compared with direct evaluation.
pub fn wks_reconstruct(f: &BandlimitedFunction, kappa: f64, truncation: usize, points: &[f64]) -> Result<WksReport> {
    let spec = f.spec();
    if spec.n() != 0 || spec.m() != 1 {
        return Err(Error::UnsupportedDimension(spec.m()));
    }
    if !(kappa > 0.0) {
        return Err(Error::NonPositiveScale(kappa));
    }
    let n = truncation as i64;
    let samples: Vec<(f64, Complex64)> = (-n..=n)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * PI / kappa;
            (t, at(f, t))
        })
        .collect();
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|x| {
            samples
                .iter()
                .map(|(t, v)| v * sinc(kappa * (x - t)))
                .sum()
        })
        .collect();
    let max_error = points
        .par_iter()
        .zip(&values)
        .map(|(x, v)| (v - at(f, *x)).norm())
        .reduce(|| 0.0, f64::max);
    Ok(WksReport { values, max_error })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::convexgeom::ConvexBody;
    use crate::presets::GroupPreset;
    use crate::spectral::{build_quadrature, DensitySpec};

    fn build(order: usize, d: DensitySpec) -> BandlimitedFunction {
        let body = ConvexBody::interval(-1.0, 1.0).unwrap();
        let q = Arc::new(build_quadrature(&body, order).unwrap());
        BandlimitedFunction::synthesize(&GroupPreset::Abelian1d.spec(), &d.build(q, None).unwrap()).unwrap()
    }

    #[test]
    fn interpolates_at_samples() {
        let f = build(256, DensitySpec::Constant(Complex64::new(1.0, 0.0)));
        let pts: Vec<f64> = (-5..=5).map(|k| k as f64 * PI).collect();
        let r = wks_reconstruct(&f, 1.0, 20, &pts).unwrap();
        assert!(r.max_error < 1e-12);
    }

    #[test]
    fn single_term_series() {
        let f = build(
            256,
            DensitySpec::GaussianBump {
                center: vec![0.0],
                width: 0.3,
            },
        );
        let pts = [0.7, 2.0, -3.1];
        let r = wks_reconstruct(&f, 1.0, 0, &pts).unwrap();
        let f0 = at(&f, 0.0);
        let expect = pts
            .iter()
            .map(|x| (at(&f, *x) - f0 * sinc(*x)).norm())
            .fold(0.0, f64::max);
        assert!((r.max_error - expect).abs() < 1e-14);
    }

    #[test]
    fn smooth_spectrum_converges() {
        let f = build(
            4096,
            DensitySpec::GaussianBump {
                center: vec![0.0],
                width: 0.15,
            },
        );
        let pts: Vec<f64> = (0..=80).map(|k| -10.0 + 0.25 * k as f64).collect();
        let r = wks_reconstruct(&f, 1.0, 2000, &pts).unwrap();
        assert!(r.max_error <= 1e-6, "{}", r.max_error);
    }
}
