//! `--config` files: JSON objects whose keys mirror the long flags of a
//! subcommand (with `_` for `-`). Flags given on the command line win.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::MANIFEST_KIND;

/// Required value of the `schema` key of every config file.
pub const CONFIG_SCHEMA: &str = "qgt.config.v1";

fn load(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    // A run manifest can be replayed directly.
    if value.get("kind").and_then(Value::as_str) == Some(MANIFEST_KIND) {
        value = value["config"].take();
    }
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!("config {} must be a JSON object", path.display())));
    };
    match map.remove("schema") {
        Some(Value::String(s)) if s == CONFIG_SCHEMA => Ok(map),
        Some(other) => Err(CliError::Usage(format!(
            "config schema {other} is not supported (expected \"{CONFIG_SCHEMA}\")"
        ))),
        None => Err(CliError::Usage(format!(
            "config {} lacks the \"schema\": \"{CONFIG_SCHEMA}\" field",
            path.display()
        ))),
    }
}

fn unset(v: &Value) -> bool {
    match v {
        Value::Null | Value::Bool(false) => true,
        Value::Array(a) => a.is_empty(),
        _ => false,
    }
}

/// Fills flags left unset on the command line from the config file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let Value::Object(mut merged) = serde_json::to_value(flags)? else {
        unreachable!("argument structs serialize to objects");
    };
    for (key, value) in load(path)? {
        let Some(slot) = merged.get_mut(&key) else {
            return Err(CliError::Usage(format!("unknown config key \"{key}\"")));
        };
        if unset(slot) {
            *slot = value;
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("invalid config value: {e}")))
}

/// The resolved arguments as a config document.
pub fn snapshot<T: Serialize>(args: &T) -> CliResult<Value> {
    let mut v = serde_json::to_value(args)?;
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::String(CONFIG_SCHEMA.into()));
    }
    Ok(v)
}

/// Unwraps a merged parameter or names the missing flag.
pub fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter --{flag}")))
}

/// Seeds are mandatory for stochastic commands.
pub fn require_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Usage("missing --seed (required for stochastic commands, directly or via --config)".into()))
}

/// Converts a percent value to a probability, checking its range.
pub fn percent(value: f64, flag: &str) -> CliResult<f64> {
    if value > 0.0 && value < 100.0 {
        Ok(value / 100.0)
    } else {
        Err(CliError::Usage(format!("--{flag} = {value} must lie in (0, 100) percent")))
    }
}
