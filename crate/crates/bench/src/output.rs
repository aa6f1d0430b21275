use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{BenchError, RunRecord};

const RECORD_COLUMNS: [&str; 13] = [
    "accelerator",
    "problem",
    "graph",
    "root",
    "iterations",
    "cycles",
    "runtime_s",
    "greps",
    "row_hits",
    "row_misses",
    "row_conflicts",
    "bytes_read",
    "bytes_written",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(BenchError::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// One point of the GREPS-by-average-degree plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub graph: String,
    pub avg_degree: f64,
    pub greps: f64,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes any serializable rows; `None` means stdout.
pub fn emit_rows<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), BenchError> {
    let mut out = sink(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Like [`emit_rows`], but an empty CSV still gets its header line.
pub fn emit_results(records: &[RunRecord], format: Format, path: Option<&Path>) -> Result<(), BenchError> {
    if format == Format::Json || !records.is_empty() {
        return emit_rows(records, format, path);
    }
    let mut out = sink(path)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(RECORD_COLUMNS)?;
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

pub fn read_results(path: &Path, format: Format) -> Result<Vec<RunRecord>, BenchError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    match format {
        Format::Json => Ok(serde_json::from_str(&text)?),
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            Ok(r.deserialize().collect::<Result<_, _>>()?)
        }
    }
}

pub fn emit_plot_data(points: &[PlotPoint], path: Option<&Path>) -> Result<(), BenchError> {
    emit_rows(points, Format::Csv, path)
}
