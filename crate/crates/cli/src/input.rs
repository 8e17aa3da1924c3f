//! Loading command inputs: files, bundled fixtures, and inline literals.

use std::path::Path;

use arithdyn::fan::{validate, Fan};
use arithdyn::heights::DynSystem;
use arithdyn::rational::{parse_rational, Rational};
use arithdyn::ratmat::{IntMatrix, RatMatrix};
use arithdyn::{Error, Result};
use serde_json::Value;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// A fan from a JSON file, or a bundled fixture by name. Invalid fans are rejected.
pub fn fan(arg: &str) -> Result<Fan> {
    let f = raw_fan(arg)?;
    let report = validate(&f);
    if !report.valid {
        let first = report.issues.first().map(|i| i.message.clone()).unwrap_or_default();
        return Err(Error::Invalid(format!("fan {arg:?} fails validation: {first}")));
    }
    Ok(f)
}

/// A fan without validation, for the `fan validate` command.
pub fn raw_fan(arg: &str) -> Result<Fan> {
    let path = Path::new(arg);
    if path.exists() {
        return Fan::from_json(&read(path)?);
    }
    Fan::bundled(arg).ok_or_else(|| {
        Error::Invalid(format!(
            "{arg:?} is neither a file nor a bundled fan (bundled: {})",
            Fan::bundled_names().join(", ")
        ))
    })
}

pub fn system(arg: &str) -> Result<DynSystem> {
    let path = Path::new(arg);
    if path.exists() {
        return DynSystem::from_json(&read(path)?);
    }
    DynSystem::bundled(arg).ok_or_else(|| {
        Error::Invalid(format!(
            "{arg:?} is neither a file nor a bundled system (bundled: {})",
            DynSystem::bundled_names().join(", ")
        ))
    })
}

fn rational_of(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        Value::Array(pair) if pair.len() == 2 => {
            let s = |x: &Value| match x {
                Value::String(t) => Ok(t.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(Error::Invalid("rational pair entries must be strings or integers".into())),
            };
            parse_rational(&format!("{}/{}", s(&pair[0])?, s(&pair[1])?))
        }
        _ => Err(Error::Invalid(format!("not a rational: {v}"))),
    }
}

fn matrix_of(v: &Value) -> Result<RatMatrix> {
    match v {
        Value::Object(map) if map.contains_key("entries") => {
            serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("matrix JSON: {e}")))
        }
        Value::Object(map) => match map.get("matrix") {
            Some(m) => matrix_of(m),
            None => Err(Error::Invalid("matrix object needs a \"matrix\" or \"entries\" field".into())),
        },
        Value::Array(rows) => {
            let rows = rows
                .iter()
                .map(|r| match r {
                    Value::Array(xs) => xs.iter().map(rational_of).collect::<Result<Vec<_>>>(),
                    _ => Err(Error::Invalid("matrix rows must be arrays".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            RatMatrix::from_rows(rows)
        }
        _ => Err(Error::Invalid("matrix must be a JSON array of rows".into())),
    }
}

/// A rational matrix from a JSON file or an inline literal `"2,0;0,3"`.
pub fn rat_matrix(arg: &str) -> Result<RatMatrix> {
    let path = Path::new(arg);
    if path.exists() {
        let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Invalid(format!("matrix JSON: {e}")))?;
        return matrix_of(&v);
    }
    if arg.trim_start().starts_with('[') || arg.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(arg).map_err(|e| Error::Invalid(format!("matrix JSON: {e}")))?;
        return matrix_of(&v);
    }
    let rows = arg
        .split(';')
        .map(|r| r.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    RatMatrix::from_rows(rows)
}

pub fn int_matrix(arg: &str) -> Result<IntMatrix> {
    rat_matrix(arg)?.to_int().map_err(|_| Error::Invalid("lattice maps must have integer entries".into()))
}

/// A rational vector from a JSON file/array or an inline `"1,0,0"`.
pub fn rat_vector(arg: &str) -> Result<Vec<Rational>> {
    let path = Path::new(arg);
    let text = if path.exists() { read(path)? } else { arg.to_string() };
    let t = text.trim();
    if t.starts_with('[') || t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::Invalid(format!("vector JSON: {e}")))?;
        let v = match &v {
            Value::Object(m) => m.get("coeffs").cloned().unwrap_or(Value::Null),
            _ => v,
        };
        return match v {
            Value::Array(xs) => xs.iter().map(rational_of).collect(),
            _ => Err(Error::Invalid("vector must be a JSON array".into())),
        };
    }
    t.split(',').map(|x| parse_rational(x.trim())).collect()
}

pub fn index_list(arg: &str) -> Result<Vec<usize>> {
    if arg.trim().is_empty() {
        return Ok(Vec::new());
    }
    arg.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Invalid(format!("bad ray index {x:?}"))))
        .collect()
}
