use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{CdfSeries, Heatmap, SerCurve};

use super::result::{ExperimentResult, Payload};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

pub const RESULT_FILE: &str = "result.json";

/// Canonical JSON text of a result.
pub fn to_json(result: &ExperimentResult) -> Result<String> {
    serde_json::to_string_pretty(result).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_json(text: &str) -> Result<ExperimentResult> {
    serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn read_result(path: &Path) -> Result<ExperimentResult> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

/// Writes the requested formats into `dir` and returns the files written.
pub fn emit(
    result: &ExperimentResult,
    formats: &[OutputFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if formats.contains(&OutputFormat::Json) {
        let path = dir.join(RESULT_FILE);
        let mut text = to_json(result)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    if formats.contains(&OutputFormat::Csv) {
        match &result.payload {
            Payload::Heatmap(p) => {
                written.push(write_csv(dir, "heatmap.csv", |w| {
                    heatmap_csv(&p.heatmap, w)
                })?);
            }
            Payload::Conditioning(p) => {
                written.push(write_csv(dir, "cdf.csv", |w| {
                    cdf_csv(&[&p.kappa_a, &p.kappa_psi], w)
                })?);
            }
            Payload::Convergence(p) => {
                written.push(write_csv(dir, "ser_vs_iteration.csv", |w| {
                    ser_csv("iteration", &p.curves, w)
                })?);
            }
            Payload::Robustness(p) => {
                written.push(write_csv(dir, "ser_vs_snr.csv", |w| {
                    ser_csv("snr_db", &p.curves, w)
                })?);
            }
        }
    }
    Ok(written)
}

type CsvWriter = csv::Writer<BufWriter<File>>;

fn write_csv(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut CsvWriter) -> csv::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(&path, io),
        other => Error::Serialization(format!("{}: {other:?}", path.display())),
    };
    body(&mut w).map_err(csv_err)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn ser_csv<W: Write>(axis: &str, curves: &[SerCurve], w: &mut csv::Writer<W>) -> csv::Result<()> {
    w.write_record([axis, "ser", "stderr", "method"])?;
    for c in curves {
        for i in 0..c.len() {
            let x = if axis == "iteration" {
                (c.x[i] as u64).to_string()
            } else {
                c.x[i].to_string()
            };
            w.write_record([
                x,
                c.ser[i].to_string(),
                c.stderr[i].to_string(),
                c.method.clone(),
            ])?;
        }
    }
    Ok(())
}

fn cdf_csv<W: Write>(series: &[&CdfSeries], w: &mut csv::Writer<W>) -> csv::Result<()> {
    w.write_record(["value", "probability", "matrix"])?;
    for s in series {
        for (v, p) in s.values.iter().zip(&s.probabilities) {
            w.write_record([v.to_string(), p.to_string(), s.label.clone()])?;
        }
    }
    Ok(())
}

fn heatmap_csv<W: Write>(h: &Heatmap, w: &mut csv::Writer<W>) -> csv::Result<()> {
    w.write_record(["row", "col", "db"])?;
    for i in 0..h.dim {
        for j in 0..h.dim {
            w.write_record([i.to_string(), j.to_string(), h.get(i, j).to_string()])?;
        }
    }
    Ok(())
}
