//! Reading command inputs from flags or from the `--json-in` object.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use qmi_core::cosets::{EndoSpec, GammaSpec};
use qmi_core::fixtures::fixture;
use qmi_core::group::FiniteGroupTable;
use qmi_core::level::TorsionPoint;
use qmi_core::order::Order;
use qmi_core::rational::parse_rational;
use qmi_core::{QuatAlgebra, QuatElement, Rational};

use crate::CliError;

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Keys from a JSON object file, consulted when a flag is absent.
#[derive(Default)]
pub struct Inputs {
    json: Map<String, Value>,
}

impl Inputs {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Inputs::default()) };
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin()).map_err(|e| usage(format!("stdin: {e}")))?
        } else {
            std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
        };
        match serde_json::from_str(&text) {
            Ok(Value::Object(json)) => Ok(Inputs { json }),
            Ok(_) => Err(usage("--json-in must hold a JSON object")),
            Err(e) => Err(usage(format!("--json-in: {e}"))),
        }
    }

    /// The flag text when given (parsed as JSON if possible, else taken as a
    /// bare string), otherwise the value under `key` in the input file.
    pub fn raw(&self, key: &str, flag: Option<&str>) -> Option<Value> {
        match flag {
            Some(s) => Some(serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))),
            None => self.json.get(key).cloned(),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str, flag: Option<&str>) -> CliResult<Option<T>> {
        self.raw(key, flag).map(|v| decode(key, v)).transpose()
    }

    pub fn require<T: DeserializeOwned>(&self, key: &str, flag: Option<&str>) -> CliResult<T> {
        self.get(key, flag)?.ok_or_else(|| missing(key))
    }

    pub fn element(&self, key: &str, flag: Option<&str>) -> CliResult<Option<QuatElement>> {
        self.raw(key, flag).map(|v| element(key, v)).transpose()
    }

    pub fn require_element(&self, key: &str, flag: Option<&str>) -> CliResult<QuatElement> {
        self.element(key, flag)?.ok_or_else(|| missing(key))
    }

    pub fn rational(&self, key: &str, flag: Option<&str>) -> CliResult<Option<Rational>> {
        self.raw(key, flag).map(|v| rational(key, &v)).transpose()
    }

    pub fn point(&self, key: &str, flag: Option<&str>) -> CliResult<TorsionPoint> {
        let v = self.raw(key, flag).ok_or_else(|| missing(key))?;
        let parts = list(key, v)?;
        let c: Vec<u64> = parts
            .iter()
            .map(|p| match p {
                Value::Number(n) => n.as_u64(),
                Value::String(s) => s.trim().parse().ok(),
                _ => None,
            })
            .collect::<Option<_>>()
            .ok_or_else(|| usage(format!("{key}: expected 4 nonnegative residues")))?;
        let c: [u64; 4] = c.try_into().map_err(|_| usage(format!("{key}: expected 4 residues")))?;
        Ok(TorsionPoint(c))
    }

    pub fn group(&self, key: &str, flag: Option<&str>) -> CliResult<FiniteGroupTable> {
        match self.raw(key, flag).ok_or_else(|| missing(key))? {
            Value::String(spec) => Ok(FiniteGroupTable::parse_spec(&spec)?),
            v => decode(key, v),
        }
    }

    /// `--fixture NAME` or an order object under `order`.
    pub fn order(&self, fixture_flag: Option<&str>, order_flag: Option<&str>) -> CliResult<Order> {
        self.named_order("fixture", "order", fixture_flag, order_flag)
    }

    pub fn named_order(&self, fkey: &str, okey: &str, fixture_flag: Option<&str>, order_flag: Option<&str>) -> CliResult<Order> {
        if let Some(name) = fixture_flag {
            return Ok(fixture(name)?);
        }
        match self.raw(okey, order_flag) {
            Some(Value::String(name)) => Ok(fixture(&name)?),
            Some(v) => decode(okey, v),
            None => match self.json.get(fkey) {
                Some(Value::String(name)) => Ok(fixture(name)?),
                _ => Err(usage(format!("an order is required: --{fkey} NAME or --{okey} JSON"))),
            },
        }
    }

    pub fn algebra(&self, a: Option<&str>, b: Option<&str>) -> CliResult<QuatAlgebra> {
        if let (Some(a), Some(b)) = (a, b) {
            let a = parse_rational(a).map_err(|e| usage(format!("-a: {e}")))?;
            let b = parse_rational(b).map_err(|e| usage(format!("-b: {e}")))?;
            return Ok(QuatAlgebra::new(a, b)?);
        }
        if a.is_some() || b.is_some() {
            return Err(usage("give both -a and -b"));
        }
        self.require("algebra", None)
    }

    pub fn gamma(&self, flag: Option<&str>) -> CliResult<GammaSpec> {
        match self.raw("gamma", flag) {
            None => Ok(GammaSpec::All),
            Some(Value::String(s)) => s.parse().map_err(|e: qmi_core::Error| usage(e.to_string())),
            Some(v) => decode("gamma", v),
        }
    }

    pub fn endo(&self, flag: Option<&str>) -> CliResult<EndoSpec> {
        match self.raw("endo", flag) {
            None => Ok(EndoSpec::Scalars),
            Some(Value::String(s)) => s.parse().map_err(|e: qmi_core::Error| usage(e.to_string())),
            Some(v) => decode("endo", v),
        }
    }
}

fn missing(key: &str) -> CliError {
    usage(format!("missing input {key:?}"))
}

pub fn decode<T: DeserializeOwned>(key: &str, v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| usage(format!("{key}: {e}")))
}

fn list(key: &str, v: Value) -> CliResult<Vec<Value>> {
    match v {
        Value::Array(a) => Ok(a),
        Value::String(s) => Ok(s.split(',').map(|p| Value::String(p.trim().to_string())).collect()),
        _ => Err(usage(format!("{key}: expected a list"))),
    }
}

fn rational(key: &str, v: &Value) -> CliResult<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(usage(format!("{key}: expected a rational string"))),
    };
    parse_rational(&text).map_err(|e| usage(format!("{key}: {e}")))
}

/// Four rationals, as a JSON array or a comma-separated string.
pub fn element(key: &str, v: Value) -> CliResult<QuatElement> {
    let parts = list(key, v)?;
    if parts.len() != 4 {
        return Err(usage(format!("{key}: expected 4 coordinates, got {}", parts.len())));
    }
    let c: Vec<Rational> = parts.iter().map(|p| rational(key, p)).collect::<CliResult<_>>()?;
    Ok(QuatElement(c.try_into().expect("length checked")))
}
