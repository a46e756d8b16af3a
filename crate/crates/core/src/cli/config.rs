//! Merging of command-line flags with an optional JSON config file.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

/// Keys shared by every command; they are read from the config file but are
/// not part of the command's own parameter record.
const COMMON_KEYS: [&str; 4] = ["command", "seed", "format", "output"];

/// Overlay the flags that were actually given onto the config file.
///
/// A flag counts as given when its serialized value is not null, not an
/// empty list and not `false`; everything else falls back to the file.
/// Returns the merged command record together with the full merged object,
/// which still holds the common keys.
pub fn merge_with_config<T>(flags: &T, file: Option<&Map<String, Value>>) -> Result<(T, Map<String, Value>), CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = file.cloned().unwrap_or_default();
    let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::usage(e.to_string()))? else {
        return Err(CliError::usage("command flags did not serialize to an object"));
    };
    for (key, value) in given {
        let absent = match &value {
            Value::Null | Value::Bool(false) => true,
            Value::Array(a) => a.is_empty(),
            _ => false,
        };
        if !absent || !merged.contains_key(&key) {
            merged.insert(key, value);
        }
    }
    let command_only: Map<String, Value> = merged
        .iter()
        .filter(|(k, _)| !COMMON_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let parsed = serde_json::from_value(Value::Object(command_only))
        .map_err(|e| CliError::usage(format!("invalid configuration: {e}")))?;
    Ok((parsed, merged))
}

pub(crate) fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config file {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::usage(format!("config file {} must hold a JSON object", path.display()))),
        Err(e) => Err(CliError::usage(format!("config file {}: {e}", path.display()))),
    }
}
