use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::doppler::{QuadratureKind, DEFAULT_NODES, ORACLE_NODES};
use crate::error::{Error, Result};
use crate::scheme::{fig1b_fields, fig1c_fields, FieldParams, SchemeConfig};

/// A fully resolved run description. Missing optional values fall back to
/// command defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scheme: SchemeConfig,
    pub fields: FieldParams,
    /// Centre of the probe scan, MHz. Defaults to the dressed resonance.
    pub omega1: Option<f64>,
    /// Full probe scan width, MHz.
    pub omega1_span: Option<f64>,
    pub points: Option<usize>,
    pub quadrature: Option<QuadratureKind>,
    pub velocity_nodes: Option<usize>,
    /// Largest optical thickness α01·z.
    pub z_max: Option<f64>,
    pub n_z: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    scheme: Option<Value>,
    fields: Option<Value>,
    omega1: Option<Value>,
    omega1_span: Option<Value>,
    points: Option<usize>,
    quadrature: Option<QuadratureKind>,
    velocity_nodes: Option<usize>,
    z_max: Option<f64>,
    n_z: Option<usize>,
}

pub fn scheme_preset(name: &str) -> Result<SchemeConfig> {
    match name {
        "na2" => Ok(SchemeConfig::sodium_preset()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

pub fn fields_preset(scheme: &SchemeConfig, name: &str) -> Result<FieldParams> {
    match name {
        "fig1b" => Ok(fig1b_fields(scheme).params()),
        "fig1c" => Ok(fig1c_fields(scheme).params()),
        "na2" => Err(Error::Config(
            "preset `na2` describes only the medium; use `fig1b` or `fig1c` for a field configuration".into(),
        )),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

impl Scenario {
    /// Sodium dimer scheme with the named field preset.
    pub fn preset(name: &str) -> Result<Self> {
        let scheme = SchemeConfig::sodium_preset();
        let fields = fields_preset(&scheme, name)?;
        Ok(Scenario::new(scheme, fields))
    }

    pub fn new(scheme: SchemeConfig, fields: FieldParams) -> Self {
        Scenario {
            scheme,
            fields,
            omega1: None,
            omega1_span: None,
            points: None,
            quadrature: None,
            velocity_nodes: None,
            z_max: None,
            n_z: None,
        }
    }

    /// Reads a TOML (`.toml`) or JSON (any other extension) scenario file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario `{}`: {e}", path.display())))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config(format!("scenario: {}", e.message())))?;
        raw.resolve()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        raw.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        for (name, value) in [("omega1", self.omega1), ("omega1_span", self.omega1_span), ("z_max", self.z_max)] {
            if value.is_some_and(|v| !v.is_finite()) {
                return Err(Error::Config(format!("`{name}` must be finite")));
            }
        }
        if self.omega1_span.is_some_and(|s| s <= 0.0) {
            return Err(Error::Config("`omega1_span` must be positive".into()));
        }
        if self.z_max.is_some_and(|z| z < 0.0) {
            return Err(Error::Config("`z_max` must be non-negative".into()));
        }
        if self.points == Some(0) {
            return Err(Error::Config("`points` must be at least 1".into()));
        }
        if self.n_z == Some(0) {
            return Err(Error::Config("`n_z` must be at least 1".into()));
        }
        if let Some(n) = self.velocity_nodes {
            if n < 8 {
                return Err(Error::GridTooSmall(n));
            }
        }
        Ok(())
    }

    pub fn quadrature_kind(&self) -> QuadratureKind {
        self.quadrature.unwrap_or(QuadratureKind::GaussHermite)
    }

    pub fn node_count(&self) -> usize {
        self.velocity_nodes.unwrap_or(match self.quadrature_kind() {
            QuadratureKind::GaussHermite => DEFAULT_NODES,
            QuadratureKind::AdaptiveTrapezoid => ORACLE_NODES,
        })
    }
}

impl RawScenario {
    fn resolve(self) -> Result<Scenario> {
        let scheme = match self.scheme {
            None => SchemeConfig::sodium_preset(),
            Some(Value::String(name)) => scheme_preset(&name)?,
            Some(v) => serde_json::from_value(v).map_err(|e| Error::Config(format!("scheme: {e}")))?,
        };
        let fields = match self.fields {
            None => return Err(Error::Config("missing key `fields` (preset name or table)".into())),
            Some(Value::String(name)) => fields_preset(&scheme, &name)?,
            Some(v) => serde_json::from_value(v).map_err(|e| Error::Config(format!("fields: {e}")))?,
        };
        let scenario = Scenario {
            scheme,
            fields,
            omega1: self.omega1.map(|v| frequency_value("omega1", v)).transpose()?,
            omega1_span: self.omega1_span.map(|v| frequency_value("omega1_span", v)).transpose()?,
            points: self.points,
            quadrature: self.quadrature,
            velocity_nodes: self.velocity_nodes,
            z_max: self.z_max,
            n_z: self.n_z,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn frequency_value(key: &str, v: Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Config(format!("`{key}` is not a representable number"))),
        Value::String(s) => parse_frequency(&s).map_err(|e| Error::Config(format!("`{key}`: {e}"))),
        other => Err(Error::Config(format!("`{key}` must be a number (MHz) or a string such as \"2GHz\", got {other}"))),
    }
}

/// Parses a frequency such as `2GHz`, `500 MHz`, `-1.5e3` (MHz) or `800kHz`; returns MHz.
pub fn parse_frequency(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let split = t
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !(matches!(c, 'e' | 'E') && is_exponent(t, i)))
        .map_or(t.len(), |(i, _)| i);
    let (number, unit) = t.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a frequency"))?;
    let scale = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "mhz" => 1.0,
        "ghz" => 1e3,
        "khz" => 1e-3,
        "hz" => 1e-6,
        other => return Err(format!("unknown frequency unit `{other}`")),
    };
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(value * scale)
}

fn is_exponent(t: &str, i: usize) -> bool {
    let before = t[..i].chars().last().is_some_and(|c| c.is_ascii_digit() || c == '.');
    let after = t[i + 1..]
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+');
    before && after
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies() {
        assert_eq!(parse_frequency("2GHz").unwrap(), 2000.0);
        assert_eq!(parse_frequency(" 500 MHz").unwrap(), 500.0);
        assert_eq!(parse_frequency("-1.5e3").unwrap(), -1500.0);
        assert_eq!(parse_frequency("2.5e-1GHz").unwrap(), 250.0);
        assert_eq!(parse_frequency("800kHz").unwrap(), 0.8);
        assert!(parse_frequency("3 furlongs").is_err());
        assert!(parse_frequency("GHz").is_err());
    }

    #[test]
    fn toml_and_json_share_schema() {
        let toml_text = r#"
            scheme = "na2"
            omega1_span = "2GHz"
            points = 101
            quadrature = "trap"
            [fields]
            g12 = 74.2
            g23plus = 5.78
            omega2 = 2300.0
            omega3plus = -1960.0
            omega3minus = 1830.0
        "#;
        let json_text = r#"{"scheme": "na2", "omega1_span": "2GHz", "points": 101, "quadrature": "trap",
            "fields": {"g12": 74.2, "g23plus": 5.78, "omega2": 2300.0, "omega3plus": -1960.0, "omega3minus": 1830.0}}"#;
        let a = Scenario::from_toml(toml_text).unwrap();
        let b = Scenario::from_json(json_text).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.omega1_span, Some(2000.0));
        assert_eq!(a.fields.g23minus, 0.0);
        assert_eq!(a.node_count(), ORACLE_NODES);
    }

    #[test]
    fn offending_key_is_named() {
        let e = Scenario::from_toml("fields = \"fig1b\"\npionts = 3\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("pionts"), "{e}");
        let e = Scenario::from_json(r#"{"fields": {"g12": 1, "g23plus": 1, "omega2": 0, "omega3plus": 0, "omega3minus": 0, "g99": 4}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("g99"), "{e}");
        let e = Scenario::from_json(r#"{"fields": "fig9"}"#).unwrap_err();
        assert!(matches!(e, Error::UnknownPreset(_)));
    }

    #[test]
    fn tiny_grid_rejected() {
        let e = Scenario::from_json(r#"{"fields": "fig1b", "velocity_nodes": 4}"#).unwrap_err();
        assert!(matches!(e, Error::GridTooSmall(4)));
    }
}
