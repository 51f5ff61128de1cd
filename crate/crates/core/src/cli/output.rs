//! Tidy CSV tables and JSON side files.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};

/// Plain decimal, switching to scientific notation below `1e-4` and at or above `1e15`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn fmt_bool(b: bool) -> String {
    if b { "true".into() } else { "false".into() }
}

/// A header row and string cells, in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV body without the metadata line.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// `# holoform <version> seed=<seed> generated=<unix seconds>`.
pub fn metadata_line(seed: u64) -> String {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("# holoform {} seed={seed} generated={ts}", env!("CARGO_PKG_VERSION"))
}

/// Everything a command produces.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub name: String,
    pub table: Table,
    pub json: Option<serde_json::Value>,
    pub all_pass: bool,
}

impl Output {
    pub fn new(name: &str, table: Table) -> Self {
        Output { name: name.into(), table, json: None, all_pass: true }
    }

    pub fn with_json<T: Serialize>(mut self, v: &T) -> Result<Self> {
        self.json = Some(serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))?);
        Ok(self)
    }

    /// Writes `<name>.csv` (and `<name>.json`) into `dir`, or the CSV to stdout.
    pub fn emit(&self, dir: Option<&Path>, seed: u64) -> Result<()> {
        let csv = format!("{}\n{}", metadata_line(seed), self.table.to_csv()?);
        match dir {
            Some(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(format!("{}.csv", self.name)), csv)?;
                if let Some(j) = &self.json {
                    let text = serde_json::to_string_pretty(j).map_err(|e| Error::Io(e.to_string()))?;
                    fs::write(d.join(format!("{}.json", self.name)), text + "\n")?;
                }
            }
            None => print!("{csv}"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(2e-5), "2e-5");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1e20), "1e20");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(&["label", "value"]);
        t.push(vec!["gap:beta=1,ratio=2".into(), fmt_num(1.0)]);
        assert_eq!(t.to_csv().unwrap(), "label,value\n\"gap:beta=1,ratio=2\",1\n");
    }
}
