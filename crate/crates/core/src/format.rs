//! JSON wire formats: the instance file, and serde helpers that keep every
//! number exact (rationals as `"p/q"` strings, integers as decimal strings,
//! square-root gauge values as `{"sqrt": "p/q"}`).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::body::{Shape, SymmetricBody};
use crate::error::{Error, Result};
use crate::gauge::GaugeValue;
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::rational::{format_rational, parse_rational, Integer, Rational};

fn parse_integer(s: &str) -> std::result::Result<Integer, String> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("malformed integer {s:?}"));
    }
    s.parse().map_err(|_| format!("malformed integer {s:?}"))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GaugeWire {
    Rational(String),
    Sqrt { sqrt: String },
}

impl From<&GaugeValue> for GaugeWire {
    fn from(g: &GaugeValue) -> Self {
        match g {
            GaugeValue::Rational(r) => GaugeWire::Rational(format_rational(r)),
            GaugeValue::Sqrt(s) => GaugeWire::Sqrt { sqrt: format_rational(s) },
        }
    }
}

impl GaugeWire {
    fn into_gauge(self) -> Result<GaugeValue> {
        Ok(match self {
            GaugeWire::Rational(r) => GaugeValue::Rational(parse_rational(&r)?),
            GaugeWire::Sqrt { sqrt } => GaugeValue::Sqrt(parse_rational(&sqrt)?),
        })
    }
}

pub fn gauge_to_json(g: &GaugeValue) -> Value {
    serde_json::to_value(GaugeWire::from(g)).expect("plain data")
}

/// `#[serde(with = ...)]` adapters.
pub mod wire {
    use super::*;

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&format_rational(r))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
            parse_rational(&String::deserialize(d)?).map_err(D::Error::custom)
        }
    }

    pub mod rational_opt {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            r.as_ref().map(format_rational).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?.map(|t| parse_rational(&t).map_err(D::Error::custom)).transpose()
        }
    }

    pub mod integer {
        use super::*;

        pub fn serialize<S: Serializer>(n: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&n.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Integer, D::Error> {
            parse_integer(&String::deserialize(d)?).map_err(D::Error::custom)
        }
    }

    pub mod integer_opt {
        use super::*;

        pub fn serialize<S: Serializer>(n: &Option<Integer>, s: S) -> std::result::Result<S::Ok, S::Error> {
            n.as_ref().map(ToString::to_string).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Integer>, D::Error> {
            Option::<String>::deserialize(d)?.map(|t| parse_integer(&t).map_err(D::Error::custom)).transpose()
        }
    }

    pub mod integer_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> std::result::Result<S::Ok, S::Error> {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Integer>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|t| parse_integer(t).map_err(D::Error::custom)).collect()
        }
    }

    pub mod integer_rows {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Integer>], s: S) -> std::result::Result<S::Ok, S::Error> {
            v.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Integer>>, D::Error> {
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|r| r.iter().map(|t| parse_integer(t).map_err(D::Error::custom)).collect())
                .collect()
        }
    }

    pub mod gauge_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[GaugeValue], s: S) -> std::result::Result<S::Ok, S::Error> {
            v.iter().map(GaugeWire::from).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<GaugeValue>, D::Error> {
            Vec::<GaugeWire>::deserialize(d)?.into_iter().map(|g| g.into_gauge().map_err(D::Error::custom)).collect()
        }
    }
}

/// A parsed instance file: `{"dim", "body": {"kind", ...}, "lattice"?: {"basis"}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub body: SymmetricBody,
    pub lattice: Lattice,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("{path}: {msg}"))
}

fn rational_at(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| at(path, e)),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()).map_err(|e| at(path, e)),
        other => Err(at(path, format!("expected a rational string or an integer, got {other}"))),
    }
}

fn vector_at(v: &Value, path: &str, len: usize) -> Result<Vec<Rational>> {
    let items = v.as_array().ok_or_else(|| at(path, "expected an array"))?;
    if items.len() != len {
        return Err(at(path, format!("expected {len} entries, got {}", items.len())));
    }
    items.iter().enumerate().map(|(i, x)| rational_at(x, &format!("{path}[{i}]"))).collect()
}

fn matrix_at(v: &Value, path: &str, rows: Option<usize>, cols: usize) -> Result<Matrix> {
    let items = v.as_array().ok_or_else(|| at(path, "expected an array of rows"))?;
    if let Some(r) = rows {
        if items.len() != r {
            return Err(at(path, format!("expected {r} rows, got {}", items.len())));
        }
    }
    if items.is_empty() {
        return Err(at(path, "expected at least one row"));
    }
    let rows = items.iter().enumerate().map(|(i, row)| vector_at(row, &format!("{path}[{i}]"), cols)).collect::<Result<_>>()?;
    Matrix::from_rows(rows)
}

impl InstanceFile {
    /// Parses and validates; shape and syntax problems are [`Error::Input`]
    /// with a JSON path, body invariant problems are [`Error::InvalidBody`].
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Input(format!("not valid JSON: {e}")))?;
        Self::from_json(&doc)
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let dim =
            doc.get("dim").and_then(Value::as_u64).filter(|&d| d >= 1).ok_or_else(|| at("dim", "expected a positive integer"))?
                as usize;
        let body = doc.get("body").ok_or_else(|| at("body", "missing"))?;
        let kind = body.get("kind").and_then(Value::as_str).ok_or_else(|| at("body.kind", "missing"))?;
        let field = |name: &str| body.get(name).ok_or_else(|| at(&format!("body.{name}"), "missing"));
        let shape = match kind {
            "box" => Shape::Box { halfwidths: vector_at(field("halfwidths")?, "body.halfwidths", dim)? },
            "hpolytope" => Shape::HPolytope { normals: matrix_at(field("normals")?, "body.normals", None, dim)? },
            "ellipsoid" => Shape::Ellipsoid { gram: matrix_at(field("gram")?, "body.gram", Some(dim), dim)? },
            other => return Err(at("body.kind", format!("unknown kind {other:?}"))),
        };
        let body = SymmetricBody::new(shape)?;
        let lattice = match doc.get("lattice") {
            None | Some(Value::Null) => Lattice::standard(dim),
            Some(l) => {
                let basis = l.get("basis").ok_or_else(|| at("lattice.basis", "missing"))?;
                Lattice::new(matrix_at(basis, "lattice.basis", Some(dim), dim)?)?
            }
        };
        Ok(Self { body, lattice })
    }

    pub fn to_json(&self) -> Value {
        let strings = |v: &[Rational]| Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect());
        let rows = |m: &Matrix| Value::Array(m.to_rows().iter().map(|r| strings(r)).collect());
        let mut body = Map::new();
        body.insert("kind".into(), json!(self.body.kind().name()));
        match self.body.shape() {
            Shape::Box { halfwidths } => body.insert("halfwidths".into(), strings(halfwidths)),
            Shape::HPolytope { normals } => body.insert("normals".into(), rows(normals)),
            Shape::Ellipsoid { gram } => body.insert("gram".into(), rows(gram)),
        };
        json!({
            "dim": self.body.dim(),
            "body": body,
            "lattice": { "basis": rows(self.lattice.basis()) },
        })
    }
}
