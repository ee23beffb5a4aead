//! Strict walker over a parsed TOML document.
//!
//! Every lookup marks its key as used; `finish` reports whatever was left.
//! Errors are collected, never returned early, so one pass reports them all.

use super::ConfigError;
use crate::units::{parse_quantity, Dimension};
use toml::{Table, Value};

#[derive(Debug, Default)]
pub(crate) struct Errors(pub Vec<ConfigError>);

impl Errors {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigError { field: field.into(), message: message.into() });
    }
}

pub(crate) struct Section<'a> {
    path: String,
    table: &'a Table,
    used: Vec<&'a str>,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "a string",
        Value::Integer(_) => "an integer",
        Value::Float(_) => "a number",
        Value::Boolean(_) => "a boolean",
        Value::Datetime(_) => "a date",
        Value::Array(_) => "an array",
        Value::Table(_) => "a table",
    }
}

pub(crate) fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl<'a> Section<'a> {
    pub fn root(table: &'a Table) -> Self {
        Section { path: String::new(), table, used: Vec::new() }
    }

    pub fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.table.get_key_value(key)?;
        self.used.push(k.as_str());
        Some(v)
    }

    fn require(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<&'a Value> {
        let v = self.take(key);
        if v.is_none() && required {
            e.push(self.field(key), "is required");
        }
        v
    }

    pub fn table(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<Section<'a>> {
        match self.require(e, key, required)? {
            Value::Table(t) => Some(Section { path: self.field(key), table: t, used: Vec::new() }),
            other => {
                e.push(self.field(key), format!("must be a table, found {}", type_name(other)));
                None
            }
        }
    }

    fn quantity_value(&self, e: &mut Errors, field: String, v: &Value, dim: Dimension) -> Option<f64> {
        match v {
            Value::String(s) => match parse_quantity(s, dim) {
                Ok(x) if x.is_finite() => Some(x),
                Ok(_) => {
                    e.push(field, "must be finite");
                    None
                }
                Err(err) => {
                    e.push(field, format!("{err}; write e.g. \"{}\"", example(dim)));
                    None
                }
            },
            Value::Integer(_) | Value::Float(_) => {
                e.push(field, format!("needs an explicit unit, e.g. \"{}\"", example(dim)));
                None
            }
            other => {
                e.push(field, format!("must be a string such as \"{}\", found {}", example(dim), type_name(other)));
                None
            }
        }
    }

    /// A string such as `"27.2 kgf"`, converted to SI.
    pub fn quantity(&mut self, e: &mut Errors, key: &str, dim: Dimension, required: bool) -> Option<f64> {
        let v = self.require(e, key, required)?;
        self.quantity_value(e, self.field(key), v, dim)
    }

    pub fn quantity_list(&mut self, e: &mut Errors, key: &str, dim: Dimension, required: bool) -> Option<Vec<f64>> {
        match self.require(e, key, required)? {
            Value::Array(items) => {
                let parsed: Vec<Option<f64>> = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| self.quantity_value(e, format!("{}[{i}]", self.field(key)), v, dim))
                    .collect();
                parsed.into_iter().collect()
            }
            other => {
                e.push(self.field(key), format!("must be an array of {dim} strings, found {}", type_name(other)));
                None
            }
        }
    }

    /// A dimensionless number.
    pub fn number(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<f64> {
        let v = self.require(e, key, required)?;
        match as_f64(v) {
            Some(x) if x.is_finite() => Some(x),
            Some(_) => {
                e.push(self.field(key), "must be finite");
                None
            }
            None => {
                e.push(self.field(key), format!("must be a plain number, found {}", type_name(v)));
                None
            }
        }
    }

    pub fn integer(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<i64> {
        match self.require(e, key, required)? {
            Value::Integer(i) => Some(*i),
            other => {
                e.push(self.field(key), format!("must be an integer, found {}", type_name(other)));
                None
            }
        }
    }

    pub fn integer_list(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<Vec<i64>> {
        match self.require(e, key, required)? {
            Value::Array(items) if items.iter().all(|v| matches!(v, Value::Integer(_))) => {
                Some(items.iter().filter_map(Value::as_integer).collect())
            }
            _ => {
                e.push(self.field(key), "must be an array of integers");
                None
            }
        }
    }

    pub fn boolean(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<bool> {
        match self.require(e, key, required)? {
            Value::Boolean(b) => Some(*b),
            other => {
                e.push(self.field(key), format!("must be true or false, found {}", type_name(other)));
                None
            }
        }
    }

    pub fn string(&mut self, e: &mut Errors, key: &str, required: bool) -> Option<&'a str> {
        match self.require(e, key, required)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                e.push(self.field(key), format!("must be a string, found {}", type_name(other)));
                None
            }
        }
    }

    /// One of `choices`.
    pub fn choice(&mut self, e: &mut Errors, key: &str, choices: &[&str], required: bool) -> Option<&'a str> {
        let s = self.string(e, key, required)?;
        if choices.contains(&s) {
            Some(s)
        } else {
            e.push(self.field(key), format!("must be one of {}, found \"{s}\"", choices.join(", ")));
            None
        }
    }

    /// Raw value, for fields whose shape is decided by the caller.
    pub fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.take(key)
    }

    /// Reports keys nobody asked for.
    pub fn finish(self, e: &mut Errors) {
        for key in self.table.keys() {
            if !self.used.contains(&key.as_str()) {
                e.push(self.field(key), "unknown key");
            }
        }
    }
}

fn example(dim: Dimension) -> &'static str {
    match dim {
        Dimension::Force => "27.2 kgf",
        Dimension::Length => "60.3 mm",
        Dimension::Angle => "90 deg",
        Dimension::Torque => "0.97 N.m",
        Dimension::Pressure => "10 MPa",
        Dimension::ForcePerLength => "1.31e4 N/m",
        Dimension::Mass => "2 kg",
        Dimension::MassPerLength => "0.17 kg/m",
        Dimension::Density => "1000 kg/m3",
        Dimension::Acceleration => "9.81 m/s2",
        Dimension::FlexuralRigidity => "0.5 N.m2",
    }
}

/// Records an error unless `ok`.
pub(crate) fn check(e: &mut Errors, ok: bool, field: String, message: &str) {
    if !ok {
        e.push(field, message);
    }
}
