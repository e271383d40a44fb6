use crate::numeric::format_sig;

/// Schema for every `--json` document, relative to the crate root.
pub const SCHEMA_PATH: &str = "docs/cli-output.schema.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Significant digits of every number written to CSV.
pub(super) const CSV_DIGITS: usize = 15;

/// Significant digits in human tables.
const TABLE_DIGITS: usize = 10;

pub(super) fn csv_num(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

pub(super) fn table_num(x: f64) -> String {
    format_sig(x, TABLE_DIGITS)
}

/// Comma-joined rows, each ended by `\n`.
pub(super) fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned columns separated by two spaces.
pub(super) fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            if i + 1 < cells.len() {
                s.extend(std::iter::repeat_n(' ', w - c.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// Label/value pairs as a two-column table.
pub(super) fn key_values(pairs: &[(String, String)]) -> String {
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|(k, v)| vec![k.clone(), v.clone()])
        .collect();
    table(&["quantity", "value"], &rows)
}

pub(super) fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_pads_all_but_last_column() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxyz  1\n");
    }

    #[test]
    fn csv_uses_unix_newlines() {
        let c = csv(&["lambda", "D"], &[vec![csv_num(1.0), csv_num(0.1)]]);
        assert_eq!(c, "lambda,D\n1,0.1\n");
    }
}
