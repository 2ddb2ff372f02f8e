//! JSON form of [`FuncDescriptor`]:
//!
//! ```json
//! {"type": "sum", "children": [
//!     {"type": "linear", "c": [1.0, 0.0]},
//!     {"type": "sinlog", "alpha": 0.1, "beta": 1.0}
//! ]}
//! ```
//!
//! `c` accepts a bare number or a `[re, im]` pair and is always written as a
//! pair. Optional keys `lipschitz_lower`, `lipschitz_upper` and
//! `derivatives` (0, 1 or 2) carry node metadata.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::descriptor::{FuncDescriptor, Meta, Node};
use crate::error::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "type",
    "c",
    "alpha",
    "beta",
    "children",
    "lipschitz_lower",
    "lipschitz_upper",
    "derivatives",
];

fn complex_to_value(c: &Complex64) -> Value {
    json!([c.re, c.im])
}

fn value_to_complex(v: &Value, path: &str) -> Result<Complex64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(|| Error::schema(path, "not a representable number")),
        Value::Array(items) if items.len() == 2 => {
            let re = items[0]
                .as_f64()
                .ok_or_else(|| Error::schema(&format!("{path}[0]"), "expected a number"))?;
            let im = items[1]
                .as_f64()
                .ok_or_else(|| Error::schema(&format!("{path}[1]"), "expected a number"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(Error::schema(path, "expected a number or a [re, im] pair")),
    }
}

impl FuncDescriptor {
    pub fn to_json_value(&self) -> Value {
        let mut obj = Map::new();
        let ty = match self.node() {
            Node::Linear(c) => {
                obj.insert("c".into(), complex_to_value(c));
                "linear"
            }
            Node::SinPlain => "sinplain",
            Node::SinLog { alpha, beta } => {
                obj.insert("alpha".into(), json!(alpha));
                obj.insert("beta".into(), json!(beta));
                "sinlog"
            }
            Node::PowerPhase { alpha } => {
                obj.insert("alpha".into(), json!(alpha));
                "powerphase"
            }
            Node::Scale(c, child) => {
                obj.insert("c".into(), complex_to_value(c));
                obj.insert("children".into(), json!([child.to_json_value()]));
                "scale"
            }
            Node::Sum(children) => {
                let items: Vec<Value> = children.iter().map(|c| c.to_json_value()).collect();
                obj.insert("children".into(), Value::Array(items));
                "sum"
            }
            Node::Complex { re, im } => {
                obj.insert(
                    "children".into(),
                    json!([re.to_json_value(), im.to_json_value()]),
                );
                "complex"
            }
        };
        obj.insert("type".into(), json!(ty));
        let meta = self.meta();
        if let Some(l) = meta.declared_lower {
            obj.insert("lipschitz_lower".into(), json!(l));
        }
        if let Some(u) = meta.declared_upper {
            obj.insert("lipschitz_upper".into(), json!(u));
        }
        if meta.max_derivative != 2 {
            obj.insert("derivatives".into(), json!(meta.max_derivative));
        }
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("descriptor JSON is always serializable")
    }

    /// Parses a descriptor, annotating failures with a `$.children[i].key`
    /// style path.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(s)
            .map_err(|e| Error::schema("$", format!("malformed JSON: {e}")))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        parse_node(value, "$")
    }
}

fn get_f64(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    let p = format!("{path}.{key}");
    obj.get(key)
        .ok_or_else(|| Error::schema(&p, "missing required field"))?
        .as_f64()
        .ok_or_else(|| Error::schema(&p, "expected a number"))
}

fn get_children<'a>(
    obj: &'a Map<String, Value>,
    path: &str,
    expected: Option<usize>,
) -> Result<Vec<(String, &'a Value)>> {
    let p = format!("{path}.children");
    let items = obj
        .get("children")
        .ok_or_else(|| Error::schema(&p, "missing required field"))?
        .as_array()
        .ok_or_else(|| Error::schema(&p, "expected an array"))?;
    match expected {
        Some(n) if items.len() != n => {
            return Err(Error::schema(&p, format!("expected {n} children, got {}", items.len())))
        }
        None if items.is_empty() => return Err(Error::schema(&p, "expected at least one child")),
        _ => {}
    }
    Ok(items
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{p}[{i}]"), v))
        .collect())
}

fn parse_node(value: &Value, path: &str) -> Result<FuncDescriptor> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))?;
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::schema(&format!("{path}.{key}"), "unknown field"));
        }
    }
    let ty = obj
        .get("type")
        .ok_or_else(|| Error::schema(&format!("{path}.type"), "missing required field"))?
        .as_str()
        .ok_or_else(|| Error::schema(&format!("{path}.type"), "expected a string"))?;
    let annotate = |e: Error| match e {
        Error::InvalidParameter(m) => Error::schema(path, m),
        other => other,
    };
    let coeff = || -> Result<Complex64> {
        let p = format!("{path}.c");
        let v = obj.get("c").ok_or_else(|| Error::schema(&p, "missing required field"))?;
        let c = value_to_complex(v, &p)?;
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::schema(&p, "coefficient must be finite"));
        }
        Ok(c)
    };
    let node = match ty {
        "linear" => Node::Linear(coeff()?),
        "sinplain" => Node::SinPlain,
        "sinlog" => {
            let alpha = get_f64(obj, "alpha", path)?;
            let beta = get_f64(obj, "beta", path)?;
            FuncDescriptor::sin_log(alpha, beta).map_err(annotate)?;
            Node::SinLog { alpha, beta }
        }
        "powerphase" => {
            let alpha = get_f64(obj, "alpha", path)?;
            FuncDescriptor::power_phase(alpha).map_err(annotate)?;
            Node::PowerPhase { alpha }
        }
        "scale" => {
            let c = coeff()?;
            let children = get_children(obj, path, Some(1))?;
            let (p, v) = &children[0];
            Node::Scale(c, Box::new(parse_node(v, p)?))
        }
        "sum" => {
            let children = get_children(obj, path, None)?;
            Node::Sum(
                children
                    .iter()
                    .map(|(p, v)| parse_node(v, p))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        "complex" => {
            let children = get_children(obj, path, Some(2))?;
            Node::Complex {
                re: Box::new(parse_node(children[0].1, &children[0].0)?),
                im: Box::new(parse_node(children[1].1, &children[1].0)?),
            }
        }
        other => {
            return Err(Error::schema(
                &format!("{path}.type"),
                format!("unknown descriptor type {other:?}"),
            ))
        }
    };
    let mut meta = Meta::default();
    if obj.contains_key("lipschitz_lower") {
        meta.declared_lower = Some(get_f64(obj, "lipschitz_lower", path)?);
    }
    if obj.contains_key("lipschitz_upper") {
        meta.declared_upper = Some(get_f64(obj, "lipschitz_upper", path)?);
    }
    if let Some(v) = obj.get("derivatives") {
        let p = format!("{path}.derivatives");
        let d = v.as_u64().ok_or_else(|| Error::schema(&p, "expected 0, 1 or 2"))?;
        if d > 2 {
            return Err(Error::schema(&p, "expected 0, 1 or 2"));
        }
        meta.max_derivative = d as u8;
    }
    Ok(FuncDescriptor::from_parts(node, meta))
}

impl Serialize for FuncDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FuncDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        FuncDescriptor::from_json_value(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_tree() {
        let s = r#"{"type":"sum","children":[{"type":"linear","c":1},{"type":"scale","c":[0,2],"children":[{"type":"sinplain"}]}]}"#;
        let f = FuncDescriptor::from_json_str(s).unwrap();
        let v = f.eval(1.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        assert!((v.im - 2.0 * 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_paths() {
        let s = r#"{"type":"sum","children":[{"type":"linear","c":1},{"type":"sinlog","alpha":-1,"beta":1}]}"#;
        match FuncDescriptor::from_json_str(s) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "$.children[1]"),
            other => panic!("unexpected {other:?}"),
        }
        let s = r#"{"type":"complex","children":[{"type":"linear"}, {"type":"sinplain"}]}"#;
        match FuncDescriptor::from_json_str(s) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "$.children[0].c"),
            other => panic!("unexpected {other:?}"),
        }
        let s = r#"{"type":"bogus"}"#;
        assert!(matches!(
            FuncDescriptor::from_json_str(s),
            Err(Error::Schema { path, .. }) if path == "$.type"
        ));
        assert!(FuncDescriptor::from_json_str("{not json").is_err());
    }

    #[test]
    fn metadata_round_trips() {
        let f = FuncDescriptor::sin_log(0.1, 1.0)
            .unwrap()
            .with_declared_bounds(Some(0.5), None)
            .with_max_derivative(1);
        let back = FuncDescriptor::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(back, f);
    }
}
