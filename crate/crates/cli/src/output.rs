//! Report emission: pretty JSON to the report file, aligned columns to stdout.

use serde_json::Value;
use std::path::Path;

use crate::UsageError;

/// Arrays longer than this are elided in the text view.
const TEXT_ARRAY_LIMIT: usize = 12;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            // complex numbers serialize as [re, im]
            Some(format!("{} {} {}i", a[0], if a[1].as_f64().unwrap_or(0.0) < 0.0 { "-" } else { "+" }, a[1].to_string().trim_start_matches('-')))
        }
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        out.push((prefix.to_string(), s));
        return;
    }
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate().take(TEXT_ARRAY_LIMIT) {
                flatten(&key(&i.to_string()), x, out);
            }
            if a.len() > TEXT_ARRAY_LIMIT {
                out.push((key("…"), format!("{} more entries in the report file", a.len() - TEXT_ARRAY_LIMIT)));
            }
        }
        _ => unreachable!(),
    }
}

/// Two aligned columns: dotted key path and value.
pub fn render_text(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        s.push_str(&format!("{k:<width$}  {v}\n"));
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), UsageError> {
    std::fs::write(path, contents).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values are finite-safe JSON");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn aligned_and_flattened() {
        let t = render_text(&json!({"a": 1, "longer": {"z": [1.5, -2.0], "ok": true}}));
        assert_eq!(t, "a          1\nlonger.ok  true\nlonger.z   1.5 - 2.0i\n");
    }

    #[test]
    fn long_arrays_elided() {
        let t = render_text(&json!({"v": (0..20).collect::<Vec<_>>()}));
        assert!(t.contains("8 more entries"));
    }
}
