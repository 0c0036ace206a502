//! Scenario files drive a sealed runtime with a fixed sequence of source
//! updates. One step per line:
//!
//! ```text
//! # comment
//! set IP "Ads Inc"
//! emit Camera picture(640x480,seed=7)
//! ```
//!
//! `set` changes what pulls observe; `emit` also publishes.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::PictureData;
use crate::runtime::{Runtime, RuntimeError};
use crate::spec::ComponentName;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Set { source: ComponentName, value: Value },
    Emit { source: ComponentName, value: Value },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Set { source, value } => write!(f, "set {source} {value}"),
            Step::Emit { source, value } => write!(f, "emit {source} {value}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: SCENARIO_PARSE_ERROR: {message}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ScenarioParseError {
    pub fn code(&self) -> &'static str {
        "SCENARIO_PARSE_ERROR"
    }
}

/// A runtime failure while applying step `step` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {}: {error}", error.code())]
pub struct ScenarioError {
    pub step: usize,
    pub error: RuntimeError,
}

/// Cursor over one line; offsets are byte offsets into `line`.
struct Cursor<'a> {
    line: &'a str,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.line[self.at..]
    }

    fn col(&self) -> usize {
        self.line[..self.at].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.at += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.at += s.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '#')
            .unwrap_or(rest.len());
        self.at += end;
        &rest[..end]
    }

    fn digits(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        self.at += end;
        &rest[..end]
    }

    fn at_delimiter(&self) -> bool {
        self.rest()
            .chars()
            .next()
            .is_none_or(|c| c.is_whitespace() || c == '#')
    }
}

type LitResult<T> = Result<T, (usize, String)>;

fn number<T: std::str::FromStr>(cur: &mut Cursor<'_>, what: &str) -> LitResult<T> {
    let col = cur.col();
    let digits = cur.digits();
    if digits.is_empty() {
        return Err((col, format!("expected {what}")));
    }
    digits
        .parse()
        .map_err(|_| (col, format!("{what} `{digits}` is out of range")))
}

fn quoted(cur: &mut Cursor<'_>) -> LitResult<String> {
    let start = cur.col();
    if !cur.eat("\"") {
        return Err((start, "expected `\"`".into()));
    }
    let mut out = String::new();
    let mut chars = cur.rest().char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                cur.at += i + 1;
                return Ok(out);
            }
            '\\' => match chars.next() {
                Some((_, e @ ('"' | '\\'))) => out.push(e),
                Some((j, e)) => {
                    cur.at += j;
                    return Err((cur.col(), format!("unknown escape `\\{e}`")));
                }
                None => break,
            },
            c => out.push(c),
        }
    }
    Err((start, "unterminated string".into()))
}

fn picture(cur: &mut Cursor<'_>) -> LitResult<PictureData> {
    let col = cur.col();
    let width: u32 = number(cur, "width")?;
    if !cur.eat("x") {
        return Err((cur.col(), "expected `x` between width and height".into()));
    }
    let height: u32 = number(cur, "height")?;
    if !cur.eat(",seed=") {
        return Err((cur.col(), "expected `,seed=`".into()));
    }
    let seed: u64 = number(cur, "seed")?;
    let mut overlays = Vec::new();
    if cur.eat(",overlays=[") && !cur.eat("]") {
        loop {
            overlays.push(quoted(cur)?);
            if cur.eat("]") {
                break;
            }
            if !cur.eat(",") {
                return Err((cur.col(), "expected `,` or `]`".into()));
            }
        }
    }
    if !cur.eat(")") {
        return Err((cur.col(), "expected `)`".into()));
    }
    PictureData::with_overlays(width, height, seed, overlays).map_err(|e| (col, e.to_string()))
}

fn literal(cur: &mut Cursor<'_>) -> LitResult<Value> {
    let col = cur.col();
    let rest = cur.rest();
    let value = if rest.starts_with('"') {
        Value::String(quoted(cur)?)
    } else if cur.eat("picture(") {
        Value::Picture(picture(cur)?)
    } else if rest.starts_with(|c: char| c == '-' || c.is_ascii_digit()) {
        let word = cur.word();
        Value::Int(
            word.parse()
                .map_err(|_| (col, format!("invalid integer `{word}`")))?,
        )
    } else {
        match cur.word() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            "" => return Err((col, "expected a value".into())),
            other => return Err((col, format!("invalid value `{other}`"))),
        }
    };
    if !cur.at_delimiter() {
        return Err((cur.col(), "unexpected text after value".into()));
    }
    Ok(value)
}

/// Parse a single value literal, e.g. `picture(640x480,seed=7)`.
pub fn parse_literal(text: &str) -> Result<Value, ScenarioParseError> {
    let mut cur = Cursor { line: text, at: 0 };
    let v = literal(&mut cur).and_then(|v| {
        cur.skip_ws();
        if cur.rest().is_empty() {
            Ok(v)
        } else {
            Err((cur.col(), "unexpected text after value".into()))
        }
    });
    v.map_err(|(col, message)| ScenarioParseError {
        line: 1,
        col,
        message,
    })
}

fn step(line: &str) -> LitResult<Option<Step>> {
    let mut cur = Cursor { line, at: 0 };
    cur.skip_ws();
    if cur.rest().is_empty() || cur.rest().starts_with('#') {
        return Ok(None);
    }
    let col = cur.col();
    let set = match cur.word() {
        "set" => true,
        "emit" => false,
        other => return Err((col, format!("expected `set` or `emit`, found `{other}`"))),
    };
    cur.skip_ws();
    let col = cur.col();
    let source = match cur.word() {
        "" => return Err((col, "expected a source name".into())),
        w => ComponentName::new(w).map_err(|e| (col, e.to_string()))?,
    };
    cur.skip_ws();
    let value = literal(&mut cur)?;
    cur.skip_ws();
    if !(cur.rest().is_empty() || cur.rest().starts_with('#')) {
        return Err((cur.col(), "unexpected text after value".into()));
    }
    Ok(Some(if set {
        Step::Set { source, value }
    } else {
        Step::Emit { source, value }
    }))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioParseError> {
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match step(line) {
            Ok(Some(s)) => steps.push(s),
            Ok(None) => {}
            Err((col, message)) => {
                return Err(ScenarioParseError {
                    line: i + 1,
                    col,
                    message,
                })
            }
        }
    }
    Ok(Scenario { steps })
}

pub fn format_scenario(sc: &Scenario) -> String {
    let mut out = String::new();
    for s in &sc.steps {
        let _ = writeln!(out, "{s}");
    }
    out
}

/// Apply every step to a sealed runtime, stopping at the first failure.
pub fn run_scenario(rt: &mut Runtime, sc: &Scenario) -> Result<(), ScenarioError> {
    for (step, s) in sc.steps.iter().enumerate() {
        let r = match s {
            Step::Set { source, value } => rt.set_source(source.as_str(), value.clone()),
            Step::Emit { source, value } => rt.emit(source.as_str(), value.clone()),
        };
        r.map_err(|error| ScenarioError { step, error })?;
    }
    Ok(())
}
