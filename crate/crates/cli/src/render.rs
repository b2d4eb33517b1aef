//! Plain-text rendering of command output.

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(if s.is_empty() { "(empty)".into() } else { s.clone() }),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", "))
        }
        _ => None,
    }
}

fn flat(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flat(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v).unwrap_or_else(|| v.to_string()))),
    }
}

fn table(name: &str, rows: &[Value], out: &mut String) {
    let mut cols: Vec<String> = Vec::new();
    let cells: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut f = Vec::new();
            flat("", r, &mut f);
            for (k, _) in &f {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
            f
        })
        .collect();
    let grid: Vec<Vec<String>> = cells
        .iter()
        .map(|f| cols.iter().map(|c| f.iter().find(|(k, _)| k == c).map(|(_, v)| v.clone()).unwrap_or_default()).collect())
        .collect();
    let width: Vec<usize> =
        (0..cols.len()).map(|j| grid.iter().map(|r| r[j].len()).chain([cols[j].len()]).max().unwrap_or(0)).collect();
    let line = |r: &[String]| {
        r.iter().zip(&width).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    out.push_str(&format!("\n{name}:\n"));
    out.push_str(&format!("  {}\n", line(&cols)));
    for r in &grid {
        out.push_str(&format!("  {}\n", line(r)));
    }
}

/// Scalars as `key: value` lines, arrays of objects as column tables.
pub fn render_table(v: &Value) -> String {
    let mut head = String::new();
    let mut tables = String::new();
    if let Value::Object(m) = v {
        for (k, x) in m {
            match x {
                Value::Array(rows) if rows.iter().any(|r| r.is_object()) => table(k, rows, &mut tables),
                _ => {
                    let mut f = Vec::new();
                    flat(k, x, &mut f);
                    for (k, s) in f {
                        head.push_str(&format!("{k}: {s}\n"));
                    }
                }
            }
        }
    }
    head + &tables
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_scalars_and_tables() {
        let v = json!({ "a": 1, "b": { "c": "x" }, "rows": [{ "n": 1, "m": "yy" }, { "n": 22 }] });
        let s = render_table(&v);
        assert!(s.starts_with("a: 1\nb.c: x\n"));
        assert!(s.ends_with("rows:\n  m   n\n  yy  1\n      22\n"), "{s}");
    }
}
