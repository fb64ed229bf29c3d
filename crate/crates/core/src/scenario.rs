//! Scenario files and report serialization helpers.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serializer};

use crate::algebra::{parse_homog, parse_rational, GaussianRational, HomogPoly, Hypersurface, WeightVector};
use crate::analytic::Curve;
use crate::error::{Error, Result};
use crate::groebner::Variety;
use crate::nevanlinna::{geometric, GrowthModel, RadialGrid};
use crate::position::HypersurfaceFamily;
use crate::smt::Problem;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(rename = "ambient_N")]
    ambient_n: Option<usize>,
    #[serde(default)]
    variety_generators: Vec<String>,
    curve: Option<RawCurve>,
    hypersurfaces: Option<Vec<RawHypersurface>>,
    epsilon: Option<String>,
    epsilon_prime: Option<String>,
    r0: Option<f64>,
    grid: Option<RawGrid>,
    truncation: Option<u32>,
    growth: Option<RawGrowth>,
    seed: Option<u64>,
    weights: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    components: Vec<String>,
    #[serde(rename = "domain_R", default)]
    domain_r: Option<serde_json::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypersurface {
    degree: u32,
    coefficients: BTreeMap<String, String>,
    #[serde(default)]
    moving: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    radii: Option<Vec<f64>>,
    from: Option<f64>,
    to: Option<f64>,
    count: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum RawGrowth {
    Logarithmic { lambda: f64 },
    Sampled(Vec<(f64, f64)>),
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub ambient_n: usize,
    pub variety_generators: Vec<HomogPoly>,
    pub variety: Variety,
    pub curve: Curve,
    pub family: HypersurfaceFamily,
    pub epsilon: BigRational,
    pub epsilon_prime: BigRational,
    pub grid: RadialGrid,
    pub truncation: Option<u32>,
    pub growth: Option<GrowthModel>,
    pub seed: Option<u64>,
    pub weights: Option<WeightVector>,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), message: message.into() }
}

fn positive_rational(field: &str, src: &str) -> Result<BigRational> {
    let r = parse_rational(src).map_err(|e| invalid(field, e.to_string()))?;
    if !r.is_positive() {
        return Err(invalid(field, "must be positive"));
    }
    Ok(r)
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Parses and validates scenario JSON.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_str(text)
        .map_err(|e| Error::Parse { context: format!("scenario JSON at line {}, column {}", e.line(), e.column()), message: e.to_string() })?;
    let ambient_n = raw.ambient_n.ok_or_else(|| invalid("ambient_N", "missing"))?;
    if ambient_n < 1 {
        return Err(invalid("ambient_N", "must be at least 1"));
    }
    let nv = ambient_n + 1;
    let variety_generators = raw
        .variety_generators
        .iter()
        .enumerate()
        .map(|(i, g)| parse_homog(g, nv).map_err(|e| invalid(format!("variety_generators[{i}]"), e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let variety = Variety::from_generators(nv, variety_generators.clone())
        .map_err(|e| invalid("variety_generators", e.to_string()))?;

    let rc = raw.curve.ok_or_else(|| invalid("curve", "missing"))?;
    let domain_r = match &rc.domain_r {
        None => f64::INFINITY,
        Some(serde_json::Value::String(s)) if s == "inf" => f64::INFINITY,
        Some(serde_json::Value::String(s)) => {
            s.parse::<f64>().map_err(|_| invalid("curve.domain_R", format!("expected \"inf\" or a number, got `{s}`")))?
        }
        Some(serde_json::Value::Number(x)) => x.as_f64().unwrap_or(f64::NAN),
        Some(other) => return Err(invalid("curve.domain_R", format!("expected \"inf\" or a number, got {other}"))),
    };
    if !(domain_r > 0.0) {
        return Err(invalid("curve.domain_R", "must be positive"));
    }
    let comps: Vec<&str> = rc.components.iter().map(String::as_str).collect();
    if comps.len() != nv {
        return Err(invalid("curve.components", format!("expected {nv} components, got {}", comps.len())));
    }
    let curve = Curve::parse(&comps, domain_r).map_err(|e| invalid("curve.components", e.to_string()))?;

    let raw_h = raw.hypersurfaces.ok_or_else(|| invalid("hypersurfaces", "missing"))?;
    if raw_h.is_empty() {
        return Err(invalid("hypersurfaces", "at least one hypersurface is required"));
    }
    let members = raw_h
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let field = format!("hypersurfaces[{j}]");
            let q = Hypersurface::parse(nv, h.degree, h.coefficients.iter().map(|(m, c)| (m.as_str(), c.as_str())))
                .map_err(|e| invalid(field.clone(), e.to_string()))?;
            if !h.moving && !q.is_fixed() {
                return Err(invalid(field, "non-constant coefficients require \"moving\": true"));
            }
            Ok(q)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = HypersurfaceFamily::new(nv, members).map_err(|e| invalid("hypersurfaces", e.to_string()))?;

    let epsilon = positive_rational("epsilon", raw.epsilon.as_deref().ok_or_else(|| invalid("epsilon", "missing"))?)?;
    let epsilon_prime = match raw.epsilon_prime.as_deref() {
        Some(s) => positive_rational("epsilon_prime", s)?,
        None => &epsilon / BigRational::from_integer(10.into()),
    };

    let r0 = raw.r0.unwrap_or(if domain_r.is_infinite() { 1.0 } else { domain_r / 4.0 });
    let grid = match raw.grid {
        None => RadialGrid::default_for(domain_r, r0)?,
        Some(RawGrid { radii: Some(v), from: None, to: None, count: None }) => RadialGrid::new(r0, v, domain_r)?,
        Some(RawGrid { radii: None, from: Some(a), to: Some(b), count: Some(c) }) if c >= 1 && a > 0.0 && b >= a => {
            RadialGrid::new(r0, geometric(a, b, c), domain_r)?
        }
        Some(_) => return Err(invalid("grid", "give either `radii` or `from`, `to`, `count`")),
    };
    let growth = raw.growth.map(|g| match g {
        RawGrowth::Logarithmic { lambda } => GrowthModel::Logarithmic { lambda },
        RawGrowth::Sampled(v) => GrowthModel::Sampled(v),
    });
    if growth.is_some() && domain_r.is_infinite() {
        return Err(invalid("growth", "a growth model only applies to finite domain_R"));
    }
    let weights = raw
        .weights
        .map(|w| {
            let entries = w
                .iter()
                .map(|s| parse_rational(s).map_err(|e| invalid("weights", e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if entries.len() != nv {
                return Err(invalid("weights", format!("expected {nv} entries, got {}", entries.len())));
            }
            WeightVector::new(entries).map_err(|e| invalid("weights", e.to_string()))
        })
        .transpose()?;
    Ok(Scenario {
        ambient_n,
        variety_generators,
        variety,
        curve,
        family,
        epsilon,
        epsilon_prime,
        grid,
        truncation: raw.truncation,
        growth,
        seed: raw.seed,
        weights,
    })
}

impl Scenario {
    pub fn to_problem(&self) -> Problem {
        Problem {
            variety: self.variety.clone(),
            family: self.family.clone(),
            curve: self.curve.clone(),
            epsilon: self.epsilon.clone(),
            epsilon_prime: self.epsilon_prime.clone(),
            grid: self.grid.clone(),
            growth: self.growth.clone(),
            truncation_override: self.truncation,
        }
    }
}

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

pub(crate) fn ser_gaussians<S: Serializer>(v: &[GaussianRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

pub(crate) fn ser_weights<S: Serializer>(w: &crate::algebra::WeightVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    ser_rationals(w.entries(), s)
}

/// Non-finite floats become the strings "inf", "-inf" and "nan".
pub(crate) fn ser_f64_inf<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn ser_opt_bigint<S: Serializer>(
    v: &Option<num_bigint::BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "ambient_N": 1,
        "curve": {"components": ["poly: 1", "poly: z"], "domain_R": "inf"},
        "hypersurfaces": [{"degree": 1, "coefficients": {"x1": "1", "x0": "-1"}}],
        "epsilon": "1/2"
    }"#;

    #[test]
    fn minimal_scenario_loads() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.ambient_n, 1);
        assert_eq!(s.family.len(), 1);
        assert_eq!(s.epsilon_prime, BigRational::new(1.into(), 20.into()));
        assert!(s.grid.domain_r.is_infinite());
        assert_eq!(s.variety.dim(), 1);
    }

    #[test]
    fn missing_epsilon_is_named() {
        let text = MINIMAL.replace(r#","epsilon": "1/2""#, "").replace(",\n        \"epsilon\": \"1/2\"", "");
        match parse_scenario(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "epsilon"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_mismatch_names_index() {
        let text = MINIMAL.replace(r#"{"x1": "1", "x0": "-1"}"#, r#"{"x1^2": "1"}"#);
        match parse_scenario(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "hypersurfaces[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn moving_flag_is_required() {
        let text = MINIMAL.replace(r#""x0": "-1""#, r#""x0": "poly: z""#);
        assert!(matches!(parse_scenario(&text), Err(Error::Validation { .. })));
        let text = text.replace(r#""x0": "poly: z"}"#, r#""x0": "poly: z"}, "moving": true"#);
        assert!(parse_scenario(&text).unwrap().family.is_moving());
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_scenario("{\n \"ambient_N\": }") {
            Err(Error::Parse { context, .. }) => assert!(context.contains("line 2")),
            other => panic!("{other:?}"),
        }
    }
}
