use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::config::{OutputFormat, ScenarioConfig};
use crate::error::Result;

/// A numeric series with named columns plus scalar metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
    /// Metadata keys repeated as trailing `# key=value` records in CSV output.
    #[serde(skip)]
    pub csv_trailer: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            metadata: BTreeMap::new(),
            csv_trailer: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// 17 significant digits in scientific notation; parses back bit-exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_meta(value: &Value) -> String {
    match value {
        Value::Number(n) => n
            .as_f64()
            .map(format_float)
            .unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    for key in &table.csv_trailer {
        if let Some(value) = table.metadata.get(key) {
            out.push_str(&format!("# {key}={}\n", format_meta(value)));
        }
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    config: &'a ScenarioConfig,
    columns: &'a [&'static str],
    rows: &'a [Vec<f64>],
    metadata: &'a BTreeMap<String, Value>,
}

pub fn render_json(config: &ScenarioConfig, table: &Table) -> Result<String> {
    let doc = JsonDocument {
        config,
        columns: &table.columns,
        rows: &table.rows,
        metadata: &table.metadata,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn render(config: &ScenarioConfig, table: &Table) -> Result<String> {
    match config.output_format {
        OutputFormat::Csv => Ok(render_csv(table)),
        OutputFormat::Json => render_json(config, table),
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
