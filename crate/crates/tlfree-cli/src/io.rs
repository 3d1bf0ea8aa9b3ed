//! Input parsing and output writing.

use crate::error::{CliError, CliResult};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;
use tlfree_core::scalar::{format_rational, parse_rational};
use tlfree_core::{Error, Rational};

/// Output of a command.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Json(Value),
    Text(String),
}

impl Output {
    pub fn render(&self) -> CliResult<String> {
        match self {
            Output::Json(v) => serde_json::to_string_pretty(v)
                .map(|s| s + "\n")
                .map_err(|e| Error::Parse(e.to_string()).into()),
            Output::Text(s) => Ok(s.clone()),
        }
    }
}

/// Write text to a file, or to stdout when no path is given.
pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Read a JSON argument given as a file path or as inline JSON text.
pub fn load<T: DeserializeOwned>(what: &str, arg: &str) -> CliResult<T> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: arg.to_string(), source })?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{what}: {e}")).into())
}

pub fn to_json<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()).into())
}

/// A rational in its wire form `"p/q"`.
pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn parse_q(s: &str) -> CliResult<Rational> {
    Ok(parse_rational(s)?)
}

/// Parse a comma-separated list of rationals.
pub fn rational_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_q).collect()
}

/// Parse a comma-separated list of non-negative integers.
pub fn usize_list(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("not a non-negative integer: {x:?}")).into()))
        .collect()
}
