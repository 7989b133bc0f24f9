//! Plot-ready tables. Every file carries the resolved config.

use crate::config::{Format, WorkbenchConfig};
use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub config: WorkbenchConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(command: &str, config: &WorkbenchConfig, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> CliResult<()> {
        debug_assert_eq!(row.len(), self.columns.len());
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(CliError::Domain(tmss_core::Error::NonPhysical(format!(
                "non-finite {} = {} in row {}",
                self.columns[i],
                row[i],
                self.rows.len()
            ))));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("table serializes") + "\n",
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = format!("# tmss {}\n", self.command);
        for line in self.config.to_toml().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("ascii"));
        out
    }

    /// Parses a CSV file written by [`Table::render`], skipping comment lines.
    pub fn parse_csv_rows(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
        let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let schema = |e: csv::Error| CliError::Schema(format!("csv: {e}"));
        let columns = r.headers().map_err(schema)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(schema)?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| CliError::Schema(format!("csv field '{f}': {e}"))))
                .collect::<CliResult<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok((columns, rows))
    }
}

/// `out` when given, else `<output_dir>/<command>.<ext>`.
pub fn output_path(out: Option<&Path>, config: &WorkbenchConfig, command: &str, format: Format) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => config.output_dir.join(format!("{command}.{}", format.extension())),
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Table::new("demo", &WorkbenchConfig::default(), &["T", "x"]);
        t.push(vec![0.1, 1.0 / 3.0]).unwrap();
        t.push(vec![0.85, 2.8e9 * std::f64::consts::PI]).unwrap();
        let (cols, rows) = Table::parse_csv_rows(&t.render(Format::Csv)).unwrap();
        assert_eq!(cols, t.columns);
        assert_eq!(rows, t.rows);
        let back: Table = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn non_finite_rows_rejected() {
        let mut t = Table::new("demo", &WorkbenchConfig::default(), &["T"]);
        assert_eq!(t.push(vec![f64::NAN]).unwrap_err().exit_code(), 4);
    }
}
