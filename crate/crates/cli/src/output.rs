use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::Value;

use crate::config::Config;
use crate::error::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Write the table as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write the JSON result envelope
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write an SVG plot
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Write NAME.csv, NAME.json and NAME.svg into this directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Header plus rows of already formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a BTreeMap<String, String>,
    pub results: Value,
    pub warnings: Vec<String>,
    pub error_estimates: Value,
}

/// Everything a command produced, before anything is written.
pub struct Artifacts {
    pub name: String,
    pub command: &'static str,
    pub table: Option<Table>,
    pub results: Value,
    pub warnings: Vec<String>,
    pub error_estimates: Value,
    /// `None` when the command has nothing to plot.
    pub plot: Option<Result<String, CliError>>,
}

impl Artifacts {
    pub fn json(&self, config: &Config) -> Result<String, CliError> {
        let envelope = Envelope {
            tool: "zeno",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config: config.as_map(),
            results: self.results.clone(),
            warnings: self.warnings.clone(),
            error_estimates: self.error_estimates.clone(),
        };
        let mut text =
            serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Io(e.into()))?;
        text.push('\n');
        Ok(text)
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Writes the requested artifacts; with no destination the JSON envelope
/// goes to stdout.
pub fn emit(artifacts: Artifacts, config: &Config, out: &OutputArgs) -> Result<(), CliError> {
    for w in &artifacts.warnings {
        eprintln!("warning: {w}");
    }
    let json = artifacts.json(config)?;
    let csv = artifacts.table.as_ref().map(Table::to_csv).transpose()?;
    let svg = match (artifacts.plot, out.svg.is_some()) {
        (Some(Ok(s)), _) => Some(s),
        (Some(Err(e)), true) => return Err(e),
        (None, true) => {
            return Err(CliError::Config(format!(
                "'{}' produces a single value; there is nothing to plot",
                artifacts.command
            )))
        }
        _ => None,
    };

    if let Some(path) = &out.csv {
        let text = csv
            .as_deref()
            .ok_or_else(|| CliError::Config("this command has no table to write".into()))?;
        write(path, text)?;
    }
    if let Some(path) = &out.json {
        write(path, &json)?;
    }
    if let (Some(path), Some(text)) = (&out.svg, &svg) {
        write(path, text)?;
    }
    if let Some(dir) = &out.out {
        let base = dir.join(&artifacts.name);
        if let Some(text) = &csv {
            write(&base.with_extension("csv"), text)?;
        }
        write(&base.with_extension("json"), &json)?;
        if let Some(text) = &svg {
            write(&base.with_extension("svg"), text)?;
        }
    }
    if out.csv.is_none() && out.json.is_none() && out.svg.is_none() && out.out.is_none() {
        std::io::stdout().write_all(json.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        let mut t = Table::new(vec!["a (1/s)".into(), "note".into()]);
        t.push(vec!["1.00000000000e0".into(), "x, \"y\"".into()]);
        assert_eq!(
            t.to_csv().unwrap(),
            "a (1/s),note\n1.00000000000e0,\"x, \"\"y\"\"\"\n"
        );
    }
}
