//! Rendering of results in the supported output formats. Every format
//! carries the effective configuration.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

/// `# config: {...}` followed by one line per entry of `extra`.
pub(crate) fn comment_lines(config: &Map<String, Value>, extra: &[String]) -> Vec<String> {
    let mut lines = vec![format!("config: {}", Value::Object(config.clone()))];
    lines.extend(extra.iter().cloned());
    lines
}

/// Render a header row and records as CSV, preceded by `# ` comments.
/// Numbers must already be formatted by the caller.
pub(crate) fn csv(comments: &[String], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Right-aligned text table under `# ` comments.
pub(crate) fn table(comments: &[String], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&line(header.to_vec()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

/// `{"config": ..., key: payload}` pretty-printed with a trailing newline.
pub(crate) fn json<T: Serialize>(config: &Map<String, Value>, key: &str, payload: &T) -> Result<String, CliError> {
    let mut root = Map::new();
    root.insert("config".into(), Value::Object(config.clone()));
    root.insert(key.into(), serde_json::to_value(payload).map_err(|e| CliError::usage(e.to_string()))?);
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).map_err(|e| CliError::usage(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Shortest decimal form that parses back to the same `f64`.
pub(crate) fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Send `text` to `path`, or to `stdout` when no path was given.
pub(crate) fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(CliError::from),
    }
}
