//! CSV and JSON result files.
//!
//! CSV: one row per (experiment, repetition) with `agg` empty, followed by
//! one `agg = mean` row per experiment. AUC and accuracy are fractions in
//! [0, 1]. JSON: `{"schema": 1, "library_version": ..., "results": [...]}`
//! with every [`ExperimentResult`] serialized verbatim.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EvalError, ExperimentResult, LIBRARY_VERSION};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment_id: String,
    pub dataset: String,
    pub encoder: String,
    pub keying: String,
    pub backend: String,
    pub strategy: String,
    pub threshold: f64,
    pub dimensions: usize,
    pub seed: Option<u64>,
    pub agg: String,
    pub auc: f64,
    pub accuracy: f64,
    pub train_ms_per_sample: Option<f64>,
    pub infer_ms_per_sample: Option<f64>,
    pub epochs: usize,
    pub train_fraction: f64,
    pub library_version: String,
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    schema: u32,
    library_version: String,
    results: Vec<ExperimentResult>,
}

fn rows(result: &ExperimentResult) -> Vec<CsvRow> {
    let c = &result.config;
    let base = CsvRow {
        experiment_id: result.experiment_id.clone(),
        dataset: c.dataset.clone(),
        encoder: c.encoder.kind.name().to_owned(),
        keying: c.encoder.effective_keying().name().to_owned(),
        backend: c.backend.name().to_owned(),
        strategy: c.strategy.name().to_owned(),
        threshold: c.threshold,
        dimensions: c.dimensions,
        seed: None,
        agg: String::new(),
        auc: 0.0,
        accuracy: 0.0,
        train_ms_per_sample: None,
        infer_ms_per_sample: None,
        epochs: c.epochs,
        train_fraction: c.train_fraction,
        library_version: result.library_version.clone(),
    };
    let mut out: Vec<CsvRow> = result
        .repetitions
        .iter()
        .map(|r| CsvRow {
            seed: Some(r.seed),
            auc: r.auc,
            accuracy: r.accuracy,
            train_ms_per_sample: r.train_ms_per_sample,
            infer_ms_per_sample: r.infer_ms_per_sample,
            ..base.clone()
        })
        .collect();
    let a = &result.aggregate;
    out.push(CsvRow {
        agg: "mean".into(),
        auc: a.auc.mean,
        accuracy: a.accuracy.mean,
        train_ms_per_sample: a.train_ms_per_sample.map(|s| s.mean),
        infer_ms_per_sample: a.infer_ms_per_sample.map(|s| s.mean),
        ..base
    });
    out
}

pub fn emit_report(results: &[ExperimentResult], format: ReportFormat, path: &Path) -> Result<(), EvalError> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for r in results {
                for row in rows(r) {
                    w.serialize(row)?;
                }
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut file = file;
            let report = JsonReport {
                schema: SCHEMA_VERSION,
                library_version: LIBRARY_VERSION.to_owned(),
                results: results.to_vec(),
            };
            serde_json::to_writer_pretty(&mut file, &report)?;
            file.write_all(b"\n")?;
            file.flush()?;
        }
    }
    Ok(())
}

pub fn read_json_report(path: &Path) -> Result<Vec<ExperimentResult>, EvalError> {
    let report: JsonReport = serde_json::from_reader(File::open(path)?)?;
    if report.schema != SCHEMA_VERSION {
        return Err(EvalError::Config(format!("unsupported report schema {}", report.schema)));
    }
    Ok(report.results)
}

pub fn read_csv_report(path: &Path) -> Result<Vec<CsvRow>, EvalError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<CsvRow>, _>>()?)
}
