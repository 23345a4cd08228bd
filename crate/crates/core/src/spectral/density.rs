//! Spectral densities sampled at quadrature nodes, and named generators.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::quadrature::Quadrature;
use crate::convexgeom::BodyKind;
use crate::error::{Error, Result};
use crate::vecops::{dist, norm, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub quad: Arc<Quadrature>,
    pub values: Vec<Complex64>,
}

impl SpectralDensity {
    pub fn new(quad: Arc<Quadrature>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != quad.len() {
            return Err(Error::DimensionMismatch {
                expected: quad.len(),
                found: values.len(),
            });
        }
        if quad.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite density value".into()));
        }
        Ok(Self { quad, values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(quad: Arc<Quadrature>, f: F) -> Result<Self> {
        let values = quad.nodes.iter().map(|n| f(n)).collect();
        Self::new(quad, values)
    }

    pub fn constant(quad: Arc<Quadrature>, value: Complex64) -> Result<Self> {
        Self::from_fn(quad, |_| value)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shares_quadrature(&self, other: &SpectralDensity) -> bool {
        Arc::ptr_eq(&self.quad, &other.quad) || *self.quad == *other.quad
    }
}

/// Named density generators.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Constant(Complex64),
    /// `exp(-|λ - c|² / (2 w²))`.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// `exp(s (|λ - c| / r_max - 1))` around the node centroid `c`.
    EndpointSpike { sharpness: f64 },
    /// Boundary-vanishing window times a random sum of Gaussians.
    Random { seed: Option<u64>, count: usize },
    /// Boundary-vanishing window raised to a power.
    Window { power: f64 },
}

fn parse_args(inner: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('[') {
            let end = r
                .find(']')
                .ok_or_else(|| Error::InvalidArgument(format!("unclosed bracket in `{inner}`")))?;
            let nums = r[..end]
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::InvalidArgument(format!("density argument: {e}")))?;
            out.push(nums);
            rest = r[end + 1..].trim_start().trim_start_matches(',').trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            let v = rest[..end]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("density argument: {e}")))?;
            out.push(vec![v]);
            rest = rest[end..].trim_start_matches(',').trim_start();
        }
    }
    Ok(out)
}

fn scalar(args: &[Vec<f64>], i: usize, what: &str) -> Result<f64> {
    match args.get(i) {
        Some(v) if v.len() == 1 => Ok(v[0]),
        _ => Err(Error::InvalidArgument(format!("expected scalar {what}"))),
    }
}

fn non_negative_int(v: f64, what: &str) -> Result<u64> {
    if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) {
        Ok(v as u64)
    } else {
        Err(Error::InvalidArgument(format!("{what} must be a non-negative integer")))
    }
}

impl DensitySpec {
    /// Parses call syntax such as `gaussian_bump([1.5], 0.2)` or `random(7, 5)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, inner) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::InvalidArgument(format!("missing `)` in `{s}`")))?;
                (&s[..i], inner)
            }
            None => (s, ""),
        };
        let args = parse_args(inner)?;
        match name.trim() {
            "constant" => {
                let v = if args.is_empty() {
                    1.0
                } else {
                    scalar(&args, 0, "constant value")?
                };
                Ok(DensitySpec::Constant(Complex64::new(v, 0.0)))
            }
            "gaussian_bump" => {
                if args.len() != 2 {
                    return Err(Error::InvalidArgument(
                        "gaussian_bump(center, width) takes two arguments".into(),
                    ));
                }
                let width = scalar(&args, 1, "width")?;
                if !(width > 0.0) {
                    return Err(Error::InvalidArgument("gaussian_bump width must be positive".into()));
                }
                Ok(DensitySpec::GaussianBump {
                    center: args[0].clone(),
                    width,
                })
            }
            "endpoint_spike" => Ok(DensitySpec::EndpointSpike {
                sharpness: scalar(&args, 0, "sharpness")?,
            }),
            "random" => match args.len() {
                1 => Ok(DensitySpec::Random {
                    seed: None,
                    count: non_negative_int(scalar(&args, 0, "count")?, "count")? as usize,
                }),
                2 => Ok(DensitySpec::Random {
                    seed: Some(non_negative_int(scalar(&args, 0, "seed")?, "seed")?),
                    count: non_negative_int(scalar(&args, 1, "count")?, "count")? as usize,
                }),
                _ => Err(Error::InvalidArgument("random(seed, count)".into())),
            },
            "window" => Ok(DensitySpec::Window {
                power: if args.is_empty() {
                    2.0
                } else {
                    scalar(&args, 0, "power")?
                },
            }),
            other => Err(Error::InvalidArgument(format!("unknown density `{other}`"))),
        }
    }

    pub fn needs_seed(&self) -> bool {
        matches!(self, DensitySpec::Random { seed: None, .. })
    }

    /// Samples the generator at the nodes of `quad`; `fallback_seed` is used
    /// by `random` when it carries no seed of its own.
    pub fn build(&self, quad: Arc<Quadrature>, fallback_seed: Option<u64>) -> Result<SpectralDensity> {
        let values = match self {
            DensitySpec::Constant(c) => vec![*c; quad.len()],
            DensitySpec::GaussianBump { center, width } => {
                if center.len() != quad.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: quad.dim(),
                        found: center.len(),
                    });
                }
                quad.nodes
                    .iter()
                    .map(|l| {
                        let d = dist(l, center);
                        Complex64::new((-d * d / (2.0 * width * width)).exp(), 0.0)
                    })
                    .collect()
            }
            DensitySpec::EndpointSpike { sharpness } => {
                let c = quad.centroid();
                let rmax = quad
                    .nodes
                    .iter()
                    .map(|l| dist(l, &c))
                    .fold(0.0_f64, f64::max)
                    .max(f64::MIN_POSITIVE);
                quad.nodes
                    .iter()
                    .map(|l| Complex64::new((sharpness * (dist(l, &c) / rmax - 1.0)).exp(), 0.0))
                    .collect()
            }
            DensitySpec::Window { power } => {
                let w = window_values(&quad);
                w.iter().map(|v| Complex64::new(v.powf(*power), 0.0)).collect()
            }
            DensitySpec::Random { seed, count } => {
                let seed = seed.or(fallback_seed).ok_or_else(|| {
                    Error::InvalidArgument("random density needs a seed".into())
                })?;
                random_values(&quad, seed, *count)
            }
        };
        SpectralDensity::new(quad, values)
    }
}

/// Product of normalized facet distances (polytopes) or `1 - |λ-c|²/r²`
/// (balls); vanishes on the boundary.
pub fn window_values(quad: &Quadrature) -> Vec<f64> {
    let body = &quad.body;
    if let BodyKind::Ball { center, radius } = body.kind() {
        return quad
            .nodes
            .iter()
            .map(|l| {
                let d = norm(&sub(l, center)) / radius;
                (1.0 - d * d).max(0.0)
            })
            .collect();
    }
    let Ok(facets) = body.facets() else {
        return vec![1.0; quad.len()];
    };
    let verts = body
        .as_polytope()
        .and_then(|p| p.vertices().map(|v| v.to_vec()))
        .unwrap_or_default();
    let depth: Vec<f64> = facets
        .iter()
        .map(|f| verts.iter().map(|v| f.value(v)).fold(0.0_f64, f64::max))
        .collect();
    quad.nodes
        .iter()
        .map(|l| {
            facets
                .iter()
                .zip(&depth)
                .map(|(f, d)| (f.value(l) / d).clamp(0.0, 1.0))
                .product()
        })
        .collect()
}

fn random_values(quad: &Quadrature, seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (0.25 * quad.body.diameter()).max(1e-12);
    let count = count.max(1);
    let centers: Vec<usize> = (0..count).map(|_| rng.random_range(0..quad.len())).collect();
    let coefs: Vec<Complex64> = (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    let window = window_values(quad);
    quad.nodes
        .iter()
        .zip(&window)
        .map(|(l, w)| {
            let s: Complex64 = centers
                .iter()
                .zip(&coefs)
                .map(|(&ci, a)| {
                    let d = dist(l, &quad.nodes[ci]);
                    a * (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .sum();
            s * w.powi(3)
        })
        .collect()
}
