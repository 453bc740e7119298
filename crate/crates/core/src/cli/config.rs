//! Config files and flag merging.
//!
//! A config file is either a JSON object or `key = value` lines (`#` starts
//! a comment, `-` in keys reads as `_`). Values that parse as JSON keep
//! their type; anything else is a string. Flags given on the command line
//! replace file entries.

use std::fs;
use std::path::Path;

use serde::de::{DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub fn parse_config_text(text: &str, source: &str) -> Result<Map<String, Value>> {
    if text.trim_start().starts_with('{') {
        return match serde_json::from_str(text) {
            Ok(Value::Object(m)) => Ok(m),
            Ok(_) => Err(Error::parse(source, 1, "config JSON must be an object")),
            Err(e) => Err(Error::parse(source, e.line(), e.to_string())),
        };
    }
    let mut map = Map::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(source, idx + 1, "expected key = value"))?;
        let key = k.trim().replace('-', "_");
        let v = v.trim();
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::parse(source, idx + 1, format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

pub fn load_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text, &path.display().to_string())
}

/// Deserializes `C` from the file entries overlaid with the flags in `args`.
/// Keys that `C` does not know are rejected.
pub fn resolve<A: Serialize, C: DeserializeOwned + Serialize>(file: Map<String, Value>, args: &A) -> Result<C> {
    let mut merged = file;
    match serde_json::to_value(args).map_err(|e| Error::InvalidConfig(e.to_string()))? {
        Value::Object(flags) => merged.extend(flags),
        _ => unreachable!("argument structs serialize to objects"),
    }
    let keys: Vec<String> = merged.keys().cloned().collect();
    let config: C = serde_json::from_value(Value::Object(merged)).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if let Value::Object(known) = serde_json::to_value(&config).map_err(|e| Error::InvalidConfig(e.to_string()))? {
        if let Some(k) = keys.iter().find(|k| !known.contains_key(*k)) {
            return Err(Error::InvalidConfig(format!("unknown config key {k:?}")));
        }
    }
    Ok(config)
}

/// Accepts a list or a comma-separated string.
pub fn string_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        One(String),
        Many(Vec<String>),
    }
    Ok(match Either::deserialize(d)? {
        Either::One(s) => s
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect(),
        Either::Many(v) => v,
    })
}
