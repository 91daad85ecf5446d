//! CSV and JSON writers for result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{Value, json};

use crate::VERSION;
use crate::config::JobConfig;
use crate::jobs::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `%.15e` as C prints it: mantissa, sign, at least two exponent digits.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.15e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(v) => sci(*v),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) => t.clone(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(v) if v.is_finite() => json!(v),
        Cell::Num(_) => Value::Null,
        Cell::Int(i) => json!(i),
        Cell::Text(t) => json!(t),
    }
}

pub fn render_csv(cfg: &JobConfig, table: &Table) -> String {
    let mut s = String::new();
    let config = serde_json::to_string(cfg).expect("config serializes");
    let notes = serde_json::to_string(&table.notes).expect("notes serialize");
    writeln!(s, "# dunkl-frft {VERSION}").unwrap();
    writeln!(s, "# config: {config}").unwrap();
    writeln!(s, "# notes: {notes}").unwrap();
    writeln!(s, "# columns: {}", table.columns.join(",")).unwrap();
    writeln!(s, "{}", table.columns.join(",")).unwrap();
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(cell_text).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}

pub fn render_json(cfg: &JobConfig, table: &Table) -> String {
    let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(cell_json).collect())).collect();
    let doc = json!({
        "version": VERSION,
        "config": cfg,
        "notes": table.notes,
        "columns": table.columns,
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}

/// Writes `<dir>/<command>.<ext>` and `<dir>/config.json`; returns the result path.
pub fn write_outputs(dir: &Path, cfg: &JobConfig, table: &Table, format: Format) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let command = serde_json::to_value(cfg.command()).expect("command serializes");
    let stem = command.as_str().expect("command is a string");
    let (ext, body) = match format {
        Format::Csv => ("csv", render_csv(cfg, table)),
        Format::Json => ("json", render_json(cfg, table)),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    fs::write(&path, body)?;
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(cfg).expect("config serializes") + "\n")?;
    Ok(path)
}
