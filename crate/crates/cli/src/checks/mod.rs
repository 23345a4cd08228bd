//! Check registry and the shared machinery each check runs on.

mod inequalities;
mod kernel;
mod projection;
mod sampling;
mod structure;

use std::sync::Arc;

use bernstein_core::normcalc::{build_slab_grid, SlabGrid};
use bernstein_core::spectral::Quadrature;
use bernstein_core::verify::CheckReport;
use bernstein_core::{build_quadrature, BandlimitedFunction, ConvexBody, DensitySpec, SpectralDensity};
use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::scenario::{member, parse_body, Field, GridParams, Scenario};

/// Tabulated plot data, written as whitespace-separated columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub file: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOutput {
    pub rows: Vec<CheckReport>,
    pub plots: Vec<Plot>,
    /// Extra artifacts: file name relative to the output directory, bytes.
    pub files: Vec<(String, Vec<u8>)>,
}

type RunFn = fn(&Context, &Params) -> CliResult<CheckOutput>;

pub struct CheckDef {
    pub name: &'static str,
    pub description: &'static str,
    /// Runs on groups whose positivity cone is empty.
    pub without_cone: bool,
    run: RunFn,
}

impl CheckDef {
    pub fn run(&self, ctx: &Context, params: &Value) -> CliResult<CheckOutput> {
        let empty = Map::new();
        let obj = params.as_object().unwrap_or(&empty);
        let p = Params { check: self.name, obj };
        let mut out = (self.run)(ctx, &p)?;
        for r in &mut out.rows {
            r.scenario = ctx.scenario.id.clone();
        }
        Ok(out)
    }
}

pub static REGISTRY: &[CheckDef] = &[
    CheckDef {
        name: "group",
        description: "group law associativity, inverses, dilation automorphism and gauge homogeneity",
        without_cone: true,
        run: structure::group,
    },
    CheckDef {
        name: "support",
        description: "supporting function: translation, ball-sum and Minkowski additivity identities",
        without_cone: true,
        run: structure::support,
    },
    CheckDef {
        name: "plancherel",
        description: "grid L2 norm against the spectral (Plancherel) norm",
        without_cone: false,
        run: inequalities::plancherel,
    },
    CheckDef {
        name: "pp",
        description: "Plancherel-Polya: ||f_h||_p <= exp(H_K(h)) ||f_0||_p",
        without_cone: false,
        run: inequalities::pp,
    },
    CheckDef {
        name: "bernstein",
        description: "Bernstein: ||d_v f||_p <= max_K |<lambda, v>| ||f||_p, with saturation",
        without_cone: false,
        run: inequalities::bernstein,
    },
    CheckDef {
        name: "real_pw",
        description: "real Paley-Wiener limit of ||P(-i d)^k f||^(1/k) against max |P| on the spectrum",
        without_cone: false,
        run: inequalities::real_pw,
    },
    CheckDef {
        name: "tangential",
        description: "tangential Bernstein bound for iterated Z_v with the sup of the lambda-form over K",
        without_cone: false,
        run: inequalities::tangential,
    },
    CheckDef {
        name: "embedding",
        description: "L^p to L^q slice embedding constant with the |h|^(1/p-1/q) factor",
        without_cone: false,
        run: inequalities::embedding,
    },
    CheckDef {
        name: "spectrum",
        description: "spectrum estimate from iterated derivative norms, per direction",
        without_cone: false,
        run: inequalities::spectrum,
    },
    CheckDef {
        name: "kernel",
        description: "reproducing kernel closed forms and the reproducing identity on a grid",
        without_cone: false,
        run: kernel::kernel,
    },
    CheckDef {
        name: "sampling",
        description: "lattice sampling: exact l2 identity in 1-D, max-bound stability and min-bound sweep",
        without_cone: false,
        run: sampling::sampling,
    },
    CheckDef {
        name: "wks",
        description: "cardinal series reconstruction in 1-D",
        without_cone: false,
        run: sampling::wks,
    },
    CheckDef {
        name: "projector",
        description: "spectral truncation: idempotence and self-adjointness",
        without_cone: false,
        run: projection::projector,
    },
    CheckDef {
        name: "multiplier",
        description: "abelian polytope multiplier by FFT: idempotence and empirical operator norms",
        without_cone: false,
        run: projection::multiplier,
    },
    CheckDef {
        name: "modulation",
        description: "modulation map: unboundedness flag against translated-norm growth",
        without_cone: false,
        run: projection::modulation,
    },
];

pub fn find(name: &str) -> Option<&'static CheckDef> {
    REGISTRY.iter().find(|c| c.name == name)
}

/// Everything a check needs from the run.
pub struct Context<'a> {
    pub scenario: &'a Scenario,
    /// Command-line seed, else the scenario seed.
    pub seed: Option<u64>,
    pub budget: Option<u128>,
}

/// A synthesized function with the pieces it came from.
pub struct Built {
    pub quad: Arc<Quadrature>,
    pub density: SpectralDensity,
    pub f: BandlimitedFunction,
}

impl Context<'_> {
    pub fn require_seed(&self, field: &str) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::validation(field, "randomized input needs a seed (scenario `seed` or --seed)"))
    }

    pub fn quadrature(&self, body: &ConvexBody, order: usize, field: &str) -> CliResult<Arc<Quadrature>> {
        build_quadrature(body, order)
            .map(Arc::new)
            .map_err(|e| CliError::core(field, e))
    }

    pub fn synthesize(&self, quad: Arc<Quadrature>, spec: &DensitySpec, field: &str) -> CliResult<Built> {
        if spec.needs_seed() {
            self.require_seed(field)?;
        }
        let density = spec.build(quad.clone(), self.seed).map_err(|e| CliError::core(field, e))?;
        let f = BandlimitedFunction::synthesize(&self.scenario.spec, &density).map_err(|e| CliError::core(field, e))?;
        Ok(Built { quad, density, f })
    }

    /// The scenario function, with `quadrature_order` and `density` overridable per check.
    pub fn function(&self, p: &Params) -> CliResult<Built> {
        let order = p.usize_or("quadrature_order", self.scenario.quadrature_order)?;
        let spec = match p.get("density") {
            Some(_) => p.density("density")?,
            None => self.scenario.density.clone(),
        };
        let quad = self.quadrature(&self.scenario.body, order, &p.path("quadrature_order"))?;
        self.synthesize(quad, &spec, &p.path("density"))
    }

    /// The per-check `grid` object, else the scenario grid.
    pub fn grid(&self, p: &Params) -> CliResult<SlabGrid> {
        let g = match p.get("grid") {
            Some(v) if !v.is_boolean() => p.grid_params(v)?,
            _ => self
                .scenario
                .grid
                .clone()
                .ok_or_else(|| CliError::validation(p.path("grid"), "this check needs a grid"))?,
        };
        build_slab_grid(
            &self.scenario.spec,
            g.zeta_extent,
            g.x_extent,
            g.zeta_points,
            g.x_points,
            self.budget,
        )
        .map_err(|e| CliError::core(p.path("grid"), e))
    }

    pub fn m(&self) -> usize {
        self.scenario.spec.m()
    }

    pub fn n(&self) -> usize {
        self.scenario.spec.n()
    }
}

/// A check's parameter object.
pub struct Params<'a> {
    pub check: &'static str,
    obj: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    pub fn path(&self, key: &str) -> String {
        format!("checks.{}.{key}", self.check)
    }

    pub fn get(&self, key: &str) -> Option<&'a Value> {
        member(self.obj, key)
    }

    fn with<T>(&self, key: &str, f: impl FnOnce(Field) -> CliResult<T>) -> CliResult<Option<T>> {
        let path = self.path(key);
        self.get(key).map(|v| f(Field::new(&path, v))).transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.with(key, |f| f.f64())?.unwrap_or(default))
    }

    pub fn positive_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.with(key, |f| f.positive())?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        Ok(self.with(key, |f| f.usize())?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        Ok(self
            .with(key, |f| f.value.as_bool().ok_or_else(|| f.err("expected true or false")))?
            .unwrap_or(default))
    }

    pub fn str_opt(&self, key: &str) -> CliResult<Option<&'a str>> {
        self.get(key)
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| CliError::validation(self.path(key), "expected a string"))
            })
            .transpose()
    }

    pub fn f64s_or(&self, key: &str, default: Vec<f64>) -> CliResult<Vec<f64>> {
        Ok(self.with(key, |f| f.vec_f64())?.unwrap_or(default))
    }

    /// A list of vectors of length `dim`; bare numbers are accepted when `dim = 1`.
    pub fn vectors_or(&self, key: &str, dim: usize, default: Vec<Vec<f64>>) -> CliResult<Vec<Vec<f64>>> {
        let Some(v) = self.get(key) else {
            return Ok(default);
        };
        let path = self.path(key);
        let f = Field::new(&path, v);
        let out = f
            .array()?
            .iter()
            .map(|e| match e.as_f64() {
                Some(x) => Ok(vec![x]),
                None => Field::new(&path, e).vec_f64(),
            })
            .collect::<CliResult<Vec<_>>>()?;
        if out.iter().any(|h| h.len() != dim) {
            return Err(f.err(format!("each entry needs {dim} components")));
        }
        Ok(out)
    }

    pub fn complex_vector_or(&self, key: &str, dim: usize, default: Vec<Complex64>) -> CliResult<Vec<Complex64>> {
        let Some(v) = self.with(key, |f| f.vec_complex())? else {
            return Ok(default);
        };
        if v.len() != dim {
            return Err(CliError::validation(self.path(key), format!("expected {dim} complex components")));
        }
        Ok(v)
    }

    pub fn density(&self, key: &str) -> CliResult<DensitySpec> {
        let path = self.path(key);
        let v = self.get(key).ok_or_else(|| CliError::validation(&path, "missing"))?;
        crate::scenario::parse_density_at(&path, v)
    }

    pub fn body(&self, key: &str, m: usize) -> CliResult<Option<ConvexBody>> {
        let path = self.path(key);
        self.get(key).map(|v| parse_body(&path, v, m)).transpose()
    }

    fn grid_params(&self, v: &Value) -> CliResult<GridParams> {
        crate::scenario::parse_grid_at(&self.path("grid"), v)
    }
}

/// `lhs ≤ limit` with the limit itself in the tolerance column.
pub fn bound_row(name: String, value: f64, limit: f64) -> CheckReport {
    let mut r = CheckReport::inequality(&name, value, limit, 0.0);
    r.tolerance = limit;
    r
}

pub fn renamed(mut r: CheckReport, name: String) -> CheckReport {
    r.name = name;
    r
}

pub fn fmt_num(v: f64) -> String {
    // Avoid `-0` in row names.
    format!("{}", if v == 0.0 { 0.0 } else { v })
}

pub fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join("|")
}

pub fn unit_vectors(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            let mut v = vec![0.0; m];
            v[j] = 1.0;
            v
        })
        .collect()
}

/// Densities to test: the scenario's own, or `count` seeded random ones.
pub fn density_family(ctx: &Context, p: &Params) -> CliResult<Vec<DensitySpec>> {
    let count = p.usize_or("densities", 0)?;
    if count == 0 {
        return Ok(vec![match p.get("density") {
            Some(_) => p.density("density")?,
            None => ctx.scenario.density.clone(),
        }]);
    }
    let base = ctx.require_seed(&p.path("densities"))?;
    let terms = p.usize_or("random_terms", 4)?;
    Ok((0..count as u64)
        .map(|i| DensitySpec::Random {
            seed: Some(base.wrapping_add(i)),
            count: terms,
        })
        .collect())
}
