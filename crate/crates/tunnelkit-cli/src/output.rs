//! Table serialization to CSV or JSON with an atomic final rename.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{CliResult, Format};

pub struct Table {
    pub command: &'static str,
    /// Effective configuration, echoed as provenance.
    pub config: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    command: &'a str,
    config: serde_json::Map<String, serde_json::Value>,
    columns: &'a [&'static str],
    rows: &'a [Vec<String>],
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self { command, config: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    fn provenance(&self) -> String {
        let pairs: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# tunnelkit {} {}", self.command, pairs.join(" "))
    }

    fn write_csv(&self, out: &mut dyn Write) -> CliResult<()> {
        writeln!(out, "{}", self.provenance())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(std::io::Error::from)?;
        for row in &self.rows {
            w.write_record(row).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> CliResult<()> {
        let config = self.config.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
        let doc = JsonTable { command: self.command, config, columns: &self.columns, rows: &self.rows };
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
        writeln!(out)?;
        Ok(())
    }

    fn write_to(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Writes to `path` through a sibling temporary file, or to standard output.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> CliResult<()> {
        match path {
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                self.write_to(format, &mut lock)
            }
            Some(path) => {
                let dir = match path.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                {
                    let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
                    self.write_to(format, &mut buf)?;
                    buf.flush()?;
                }
                tmp.as_file().sync_all()?;
                tmp.persist(path).map_err(|e| e.error)?;
                Ok(())
            }
        }
    }
}
