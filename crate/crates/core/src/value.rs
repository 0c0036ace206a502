//! Runtime values and their provenance.

use std::collections::BTreeSet;
use std::fmt;

use crate::sim::PictureData;
use crate::spec::{ComponentName, DataType};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    String(String),
    Picture(PictureData),
}

impl Value {
    pub fn data_type(&self) -> DataType {
        match self {
            Value::Bool(_) => DataType::Bool,
            Value::Int(_) => DataType::Int,
            Value::String(_) => DataType::String,
            Value::Picture(_) => DataType::Picture,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_picture(&self) -> Option<&PictureData> {
        match self {
            Value::Picture(p) => Some(p),
            _ => None,
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::String(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::String(s)
    }
}

impl From<PictureData> for Value {
    fn from(p: PictureData) -> Self {
        Value::Picture(p)
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// Scenario literal syntax: `true`, `-3`, `"text"`, `picture(640x480,seed=7)`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::String(s) => write_quoted(f, s),
            Value::Picture(p) => write!(f, "{p}"),
        }
    }
}

/// Names of the sources a value was derived from.
pub type Taints = BTreeSet<ComponentName>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaintedValue {
    pub value: Value,
    pub taints: Taints,
}

impl TaintedValue {
    pub fn new(value: Value, taints: Taints) -> Self {
        TaintedValue { value, taints }
    }

    pub fn from_source(value: Value, source: &ComponentName) -> Self {
        TaintedValue {
            value,
            taints: BTreeSet::from([source.clone()]),
        }
    }
}

pub fn format_taints(taints: &Taints) -> String {
    let names: Vec<&str> = taints.iter().map(ComponentName::as_str).collect();
    format!("{{{}}}", names.join(","))
}

impl fmt::Display for TaintedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} taints={}", self.value, format_taints(&self.taints))
    }
}
