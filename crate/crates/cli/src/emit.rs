//! Deterministic CSV / JSON emission.
//!
//! Floats print with 17 significant digits ('.' decimal), which round-trips
//! f64 exactly; repeated runs with the same configuration produce identical
//! bytes. Non-finite values are never written: failed cells carry an error
//! message in the status column instead.

use std::fs;
use std::io::Write;
use std::path::Path;

/// 17-significant-digit float format (round-trip exact for f64).
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x:.16e}")
}

/// A cell value that is either a finite number or a status message.
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_f64(*x),
            Cell::Num(_) => "non-finite".to_string(),
            Cell::Text(s) => s.replace(',', ";"),
        }
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self, command: &str, config_echo: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# magspec {command}\n"));
        out.push_str(&format!("# config {config_echo}\n"));
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, command: &str, config: &serde_json::Value) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(x) if x.is_finite() => serde_json::json!(x),
                            Cell::Num(_) => serde_json::json!("non-finite"),
                            Cell::Text(s) => serde_json::json!(s),
                        };
                        (k.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "command": command,
            "config": config,
            "rows": rows,
        })
    }
}

/// Write to the given path, or stdout when absent.
pub fn write_output(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(content.as_bytes())
        }
    }
}
