//! Scenario files: JSON with a schema version, validated into typed parts.

use std::path::Path;

use bernstein_core::convexgeom::cone_preset;
use bernstein_core::spectral::DensitySpec;
use bernstein_core::{ConvexBody, GroupPreset, GroupSpec};
use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone)]
pub struct GridParams {
    pub zeta_extent: f64,
    pub x_extent: f64,
    pub zeta_points: usize,
    pub x_points: usize,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub seed: Option<u64>,
    pub preset: Option<GroupPreset>,
    pub spec: GroupSpec,
    /// `K` as written.
    pub declared_body: ConvexBody,
    /// `K` clipped by the cone, when one is given.
    pub body: ConvexBody,
    pub quadrature_order: usize,
    pub density: DensitySpec,
    pub grid: Option<GridParams>,
    pub lattice: Option<Value>,
    /// Check names in file order with their parameter objects.
    pub checks: Vec<(String, Value)>,
}

/// Typed access to a JSON value with its dotted path for error messages.
#[derive(Clone, Copy)]
pub struct Field<'a> {
    pub path: &'a str,
    pub value: &'a Value,
}

impl<'a> Field<'a> {
    pub fn new(path: &'a str, value: &'a Value) -> Self {
        Self { path, value }
    }

    pub fn err(&self, message: impl Into<String>) -> CliError {
        CliError::validation(self.path, message)
    }

    pub fn f64(&self) -> CliResult<f64> {
        self.value
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err("expected a finite number"))
    }

    pub fn positive(&self) -> CliResult<f64> {
        let v = self.f64()?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err("expected a positive number"))
        }
    }

    pub fn usize(&self) -> CliResult<usize> {
        self.value
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    pub fn u64(&self) -> CliResult<u64> {
        self.value
            .as_u64()
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    pub fn str(&self) -> CliResult<&'a str> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    pub fn array(&self) -> CliResult<&'a Vec<Value>> {
        self.value.as_array().ok_or_else(|| self.err("expected an array"))
    }

    pub fn object(&self) -> CliResult<&'a Map<String, Value>> {
        self.value.as_object().ok_or_else(|| self.err("expected an object"))
    }

    pub fn vec_f64(&self) -> CliResult<Vec<f64>> {
        self.array()?
            .iter()
            .map(|v| Field::new(self.path, v).f64())
            .collect()
    }

    pub fn vec_vec_f64(&self) -> CliResult<Vec<Vec<f64>>> {
        self.array()?
            .iter()
            .map(|v| Field::new(self.path, v).vec_f64())
            .collect()
    }

    /// `[re, im]` or a plain number.
    pub fn complex(&self) -> CliResult<Complex64> {
        if let Some(v) = self.value.as_f64() {
            return Ok(Complex64::new(v, 0.0));
        }
        match self.vec_f64()?.as_slice() {
            [re, im] => Ok(Complex64::new(*re, *im)),
            _ => Err(self.err("expected a number or [re, im]")),
        }
    }

    pub fn vec_complex(&self) -> CliResult<Vec<Complex64>> {
        self.array()?
            .iter()
            .map(|v| Field::new(self.path, v).complex())
            .collect()
    }
}

/// Optional member of a JSON object.
pub fn member<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

pub fn load(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse(&text)
}

pub fn parse(text: &str) -> CliResult<Scenario> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = Field::new("<root>", &root).object()?;
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::validation(key.as_str(), "unknown field"));
        }
    }
    let version = obj
        .get("schema_version")
        .ok_or_else(|| CliError::validation("schema_version", "missing"))?;
    let version = Field::new("schema_version", version).u64()?;
    if version != SCHEMA_VERSION {
        return Err(CliError::validation(
            "schema_version",
            format!("unsupported version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    let id = match member(obj, "id") {
        Some(v) => Field::new("id", v).str()?.to_string(),
        None => return Err(CliError::validation("id", "missing")),
    };
    if id.is_empty() || id.contains([',', '\n', '"']) {
        return Err(CliError::validation("id", "must be non-empty without commas, quotes or newlines"));
    }
    let seed = member(obj, "seed").map(|v| Field::new("seed", v).u64()).transpose()?;
    let (preset, spec) = parse_group(obj.get("group").ok_or_else(|| CliError::validation("group", "missing"))?)?;
    let declared_body = parse_body(
        "K",
        obj.get("K").ok_or_else(|| CliError::validation("K", "missing"))?,
        spec.m(),
    )?;
    let body = match member(obj, "cone") {
        Some(v) => {
            let f = Field::new("cone", v);
            let cone = cone_preset(f.str()?, spec.m()).map_err(|e| f.err(e.to_string()))?;
            let clipped = declared_body
                .intersect_with_cone(&cone)
                .map_err(|e| f.err(e.to_string()))?;
            if clipped.is_empty() {
                return Err(f.err("K does not meet the cone"));
            }
            clipped
        }
        None => declared_body.clone(),
    };
    let quadrature_order = match member(obj, "quadrature_order") {
        Some(v) => Field::new("quadrature_order", v).usize()?,
        None => 24,
    };
    if quadrature_order == 0 {
        return Err(CliError::validation("quadrature_order", "must be positive"));
    }
    let density = match member(obj, "density") {
        Some(v) => parse_density_at("density", v)?,
        None => DensitySpec::Constant(Complex64::new(1.0, 0.0)),
    };
    let grid = member(obj, "grid").map(|v| parse_grid_at("grid", v)).transpose()?;
    let lattice = member(obj, "lattice").cloned();
    if let Some(l) = &lattice {
        Field::new("lattice", l).object()?;
    }
    let checks = match member(obj, "checks") {
        Some(v) => parse_checks(v)?,
        None => Vec::new(),
    };
    Ok(Scenario {
        id,
        seed,
        preset,
        spec,
        declared_body,
        body,
        quadrature_order,
        density,
        grid,
        lattice,
        checks,
    })
}

const KNOWN_KEYS: [&str; 11] = [
    "schema_version",
    "id",
    "seed",
    "group",
    "K",
    "cone",
    "quadrature_order",
    "density",
    "grid",
    "lattice",
    "checks",
];

fn parse_group(v: &Value) -> CliResult<(Option<GroupPreset>, GroupSpec)> {
    let f = Field::new("group", v);
    if let Some(name) = v.as_str() {
        let p = GroupPreset::from_id(name).ok_or_else(|| f.err(format!("unknown preset `{name}`")))?;
        return Ok((Some(p), p.spec()));
    }
    let obj = f.object()?;
    if let Some(name) = member(obj, "preset") {
        let name = Field::new("group.preset", name).str()?;
        let p = GroupPreset::from_id(name)
            .ok_or_else(|| CliError::validation("group.preset", format!("unknown preset `{name}`")))?;
        return Ok((Some(p), p.spec()));
    }
    let n = Field::new("group.n", obj.get("n").ok_or_else(|| CliError::validation("group.n", "missing"))?).usize()?;
    let m = Field::new("group.m", obj.get("m").ok_or_else(|| CliError::validation("group.m", "missing"))?).usize()?;
    let a = obj.get("A").ok_or_else(|| CliError::validation("group.A", "missing"))?;
    let fa = Field::new("group.A", a);
    let mats = fa
        .array()?
        .iter()
        .map(|mat| {
            Field::new("group.A", mat)
                .array()?
                .iter()
                .map(|row| {
                    Field::new("group.A", row)
                        .array()?
                        .iter()
                        .map(|e| match Field::new("group.A", e).vec_f64()?.as_slice() {
                            [re, im] => Ok([*re, *im]),
                            _ => Err(fa.err("entries are [re, im] pairs")),
                        })
                        .collect::<CliResult<Vec<[f64; 2]>>>()
                })
                .collect::<CliResult<Vec<Vec<[f64; 2]>>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    let spec = GroupSpec::from_entries(n, m, &mats).map_err(|e| fa.err(e.to_string()))?;
    Ok((None, spec))
}

/// `{"interval": [a, b]}`, `{"box": {"lo", "hi"}}`, `{"polytope": [...]}`,
/// `{"ball": {"center", "radius"}}` or `{"sum": [K1, K2, ...]}`.
pub fn parse_body(path: &str, v: &Value, m: usize) -> CliResult<ConvexBody> {
    let f = Field::new(path, v);
    let obj = f.object()?;
    if obj.len() != 1 {
        return Err(f.err("expected exactly one of interval, box, polytope, ball, sum"));
    }
    let (kind, inner) = obj.iter().next().expect("one entry");
    let sub = format!("{path}.{kind}");
    let g = Field::new(&sub, inner);
    let body = match kind.as_str() {
        "interval" => match g.vec_f64()?.as_slice() {
            [a, b] if a <= b => ConvexBody::interval(*a, *b),
            [_, _] => return Err(g.err("interval endpoints must satisfy a <= b")),
            _ => return Err(g.err("expected [a, b]")),
        },
        "box" => {
            let o = g.object()?;
            let lo = Field::new(&sub, o.get("lo").ok_or_else(|| g.err("missing lo"))?).vec_f64()?;
            let hi = Field::new(&sub, o.get("hi").ok_or_else(|| g.err("missing hi"))?).vec_f64()?;
            if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
                return Err(g.err("need lo <= hi in every coordinate"));
            }
            ConvexBody::boxed(&lo, &hi)
        }
        "polytope" => ConvexBody::polytope(g.vec_vec_f64()?),
        "ball" => {
            let o = g.object()?;
            let c = Field::new(&sub, o.get("center").ok_or_else(|| g.err("missing center"))?).vec_f64()?;
            let r = Field::new(&sub, o.get("radius").ok_or_else(|| g.err("missing radius"))?).positive()?;
            ConvexBody::ball(c, r)
        }
        "sum" => {
            let parts = g
                .array()?
                .iter()
                .map(|p| parse_body(&sub, p, m))
                .collect::<CliResult<Vec<_>>>()?;
            let mut it = parts.into_iter();
            let first = it.next().ok_or_else(|| g.err("empty sum"))?;
            it.try_fold(first, |acc, p| acc.minkowski_sum(&p))
        }
        other => return Err(f.err(format!("unknown body kind `{other}`"))),
    }
    .map_err(|e| g.err(e.to_string()))?;
    if body.dim() != m {
        return Err(f.err(format!("body has dimension {}, group centre has dimension {m}", body.dim())));
    }
    if body.is_empty() {
        return Err(f.err("empty body"));
    }
    Ok(body)
}

/// Call syntax `"gaussian_bump([1.5], 0.2)"` or an object with `kind`.
pub fn parse_density_at(path: &str, v: &Value) -> CliResult<DensitySpec> {
    let f = Field::new(path, v);
    if let Some(s) = v.as_str() {
        return DensitySpec::parse(s).map_err(|e| f.err(e.to_string()));
    }
    let obj = f.object()?;
    let kind = f.object()?.get("kind").ok_or_else(|| f.err("missing kind"))?;
    let kind = Field::new(path, kind).str()?;
    let get = |k: &str| member(obj, k).map(|v| Field::new(path, v));
    let need = |k: &str| get(k).ok_or_else(|| f.err(format!("{kind} needs `{k}`")));
    Ok(match kind {
        "constant" => DensitySpec::Constant(match get("value") {
            Some(v) => v.complex()?,
            None => Complex64::new(1.0, 0.0),
        }),
        "gaussian_bump" => DensitySpec::GaussianBump {
            center: need("center")?.vec_f64()?,
            width: need("width")?.positive()?,
        },
        "endpoint_spike" => DensitySpec::EndpointSpike {
            sharpness: need("sharpness")?.f64()?,
        },
        "random" => DensitySpec::Random {
            seed: get("seed").map(|s| s.u64()).transpose()?,
            count: need("count")?.usize()?,
        },
        "window" => DensitySpec::Window {
            power: match get("power") {
                Some(p) => p.positive()?,
                None => 2.0,
            },
        },
        other => return Err(f.err(format!("unknown density kind `{other}`"))),
    })
}

pub fn parse_grid_at(path: &str, v: &Value) -> CliResult<GridParams> {
    let f = Field::new(path, v);
    let o = f.object()?;
    let get = |k: &'static str| -> CliResult<Field<'_>> {
        Ok(Field::new(path, o.get(k).ok_or_else(|| CliError::validation(format!("{path}.{k}"), "missing"))?))
    };
    let g = GridParams {
        zeta_extent: get("zeta_extent")?.positive()?,
        x_extent: get("x_extent")?.positive()?,
        zeta_points: get("zeta_points")?.usize()?,
        x_points: get("x_points")?.usize()?,
    };
    if g.zeta_points == 0 || g.x_points == 0 {
        return Err(f.err("point counts must be positive"));
    }
    Ok(g)
}

/// `["pp", "bernstein"]` or `{"pp": {...params}, "bernstein": {}}`.
fn parse_checks(v: &Value) -> CliResult<Vec<(String, Value)>> {
    let f = Field::new("checks", v);
    let list: Vec<(String, Value)> = if let Some(arr) = v.as_array() {
        arr.iter()
            .map(|n| Ok((Field::new("checks", n).str()?.to_string(), Value::Object(Map::new()))))
            .collect::<CliResult<_>>()?
    } else {
        f.object()?
            .iter()
            .map(|(k, p)| {
                let p = if p.is_null() { Value::Object(Map::new()) } else { p.clone() };
                Field::new("checks", &p).object()?;
                Ok((k.clone(), p))
            })
            .collect::<CliResult<_>>()?
    };
    for (name, _) in &list {
        if crate::checks::find(name).is_none() {
            return Err(f.err(format!("unknown check `{name}`")));
        }
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"{"schema_version": 1, "id": "t", "group": "heisenberg", "K": {"interval": [1, 2]}}"#.into()
    }

    #[test]
    fn minimal_scenario_parses() {
        let s = parse(&minimal()).unwrap();
        assert_eq!(s.preset, Some(GroupPreset::Heisenberg));
        assert_eq!(s.quadrature_order, 24);
        assert!(s.checks.is_empty());
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse("{\n  \"id\": }") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_body_is_a_validation_error() {
        let text = minimal().replace(r#"{"interval": [1, 2]}"#, r#"{"interval": [2]}"#);
        assert!(matches!(parse(&text), Err(CliError::Validation { field, .. }) if field == "K.interval"));
        let text = minimal().replace(r#"{"interval": [1, 2]}"#, r#"{"box": {"lo": [0, 0], "hi": [1, 1]}}"#);
        assert!(matches!(parse(&text), Err(CliError::Validation { field, .. }) if field == "K"));
    }

    #[test]
    fn explicit_group_and_density_object() {
        let text = r#"{"schema_version": 1, "id": "x",
            "group": {"n": 1, "m": 1, "A": [[[[1, 0]]]]},
            "K": {"interval": [1, 2]},
            "density": {"kind": "gaussian_bump", "center": [1.5], "width": 0.2},
            "checks": {"pp": {"h": [[0.5]]}}}"#;
        let s = parse(text).unwrap();
        assert_eq!(s.spec, GroupPreset::Heisenberg.spec());
        assert_eq!(s.checks[0].0, "pp");
    }

    #[test]
    fn unknown_names_are_rejected() {
        let text = minimal().replace("\"id\"", "\"checks\": [\"nope\"], \"id\"");
        assert!(matches!(parse(&text), Err(CliError::Validation { .. })));
        let text = minimal().replace("\"id\"", "\"colour\": 1, \"id\"");
        assert!(matches!(parse(&text), Err(CliError::Validation { .. })));
    }

    #[test]
    fn cone_clips_body() {
        let text = minimal().replace("[1, 2]", "[-1, 2]").replace("\"id\"", "\"cone\": \"orthant\", \"id\"");
        let s = parse(&text).unwrap();
        assert_eq!(s.body.vertices().unwrap().len(), 2);
        assert_eq!(s.body.support(&[1.0]), 0.0);
    }
}
