//! Plain-text rendering of JSON reports.

use serde_json::Value;

fn is_matrix(map: &serde_json::Map<String, Value>) -> bool {
    map.contains_key("rows") && map.contains_key("cols") && map.get("data").is_some_and(Value::is_array)
}

fn complex_pair(v: &Value) -> Option<(f64, f64)> {
    match v.as_array()?.as_slice() {
        [re, im] => Some((re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn fmt_complex(re: f64, im: f64) -> String {
    if im.abs() < 5e-7 {
        format!("{re:>8.4}")
    } else {
        format!("{re:>8.4}{:+.4}i", im)
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(if *b { "yes".into() } else { "no".into() }),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline_list(items: &[Value]) -> Option<String> {
    if let Some(pairs) = items.iter().map(complex_pair).collect::<Option<Vec<_>>>() {
        if !pairs.is_empty() {
            let parts: Vec<String> = pairs.iter().map(|&(re, im)| fmt_complex(re, im).trim().to_string()).collect();
            return Some(format!("[{}]", parts.join(", ")));
        }
    }
    let parts = items.iter().map(scalar).collect::<Option<Vec<_>>>()?;
    Some(format!("[{}]", parts.join(", ")))
}

fn matrix_lines(map: &serde_json::Map<String, Value>, pad: &str, out: &mut String) {
    let rows = map["rows"].as_u64().unwrap_or(0) as usize;
    let cols = map["cols"].as_u64().unwrap_or(0) as usize;
    let data = map["data"].as_array().map(Vec::as_slice).unwrap_or(&[]);
    for r in 0..rows {
        let cells: Vec<String> = (0..cols)
            .map(|c| data.get(r * cols + c).and_then(complex_pair).map_or("?".into(), |(re, im)| fmt_complex(re, im)))
            .collect();
        out.push_str(&format!("{pad}{}\n", cells.join(" ")));
    }
}

fn entry(key: &str, v: &Value, pad: &str, out: &mut String) {
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    match v {
        Value::Object(map) if is_matrix(map) => {
            out.push_str(&format!("{pad}{key}: {}x{} matrix\n", map["rows"], map["cols"]));
            matrix_lines(map, &format!("{pad}  "), out);
            for (k, extra) in map.iter().filter(|(k, _)| !matches!(k.as_str(), "rows" | "cols" | "data")) {
                entry(k, extra, &format!("{pad}  "), out);
            }
        }
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            object(map, &format!("{pad}  "), out);
        }
        Value::Array(items) if items.is_empty() => out.push_str(&format!("{pad}{key}: []\n")),
        Value::Array(items) => match inline_list(items) {
            Some(line) => out.push_str(&format!("{pad}{key}: {line}\n")),
            None => {
                out.push_str(&format!("{pad}{key}:\n"));
                for (i, item) in items.iter().enumerate() {
                    entry(&format!("[{i}]"), item, &format!("{pad}  "), out);
                }
            }
        },
        _ => unreachable!("scalars handled above"),
    }
}

fn object(map: &serde_json::Map<String, Value>, pad: &str, out: &mut String) {
    for (k, v) in map {
        entry(k, v, pad, out);
    }
}

/// Renders a JSON value as indented `key: value` lines. Matrices print as
/// grids, complex vectors and scalar lists inline.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(map) => object(map, "", &mut out),
        other => entry("value", other, "", &mut out),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_nested_values() {
        let v = json!({
            "name": "two-block",
            "ok": true,
            "values": [0.5, -1.0],
            "inner": {"dim": 2, "missing": null},
        });
        let text = render(&v);
        assert!(text.contains("name: two-block\n"));
        assert!(text.contains("ok: yes\n"));
        assert!(text.contains("values: [0.5, -1.0]\n"));
        assert!(text.contains("inner:\n  dim: 2\n  missing: none\n"));
    }

    #[test]
    fn renders_matrices_as_grids() {
        let v = json!({"m": {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.5], [0.0, -0.5], [2.0, 0.0]]}});
        let text = render(&v);
        assert!(text.starts_with("m: 2x2 matrix\n"));
        assert!(text.contains("  1.0000   0.0000+0.5000i\n"));
    }

    #[test]
    fn renders_complex_vectors_inline() {
        let v = json!({"v": [[1.0, 0.0], [0.0, -1.0]]});
        assert_eq!(render(&v), "v: [1.0000, 0.0000-1.0000i]\n");
    }
}
