//! Experiment harness: repeated stratified train/test runs, parameter sweeps
//! and machine-readable reports.

mod auc;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode::{EncodeError, EncoderConfig, EncoderKind, NodeKeying};
use crate::graph::{stratified_split, Dataset, GraphError};
use crate::learner::{AssociativeMemory, LearnError, Strategy, DEFAULT_THRESHOLD};
use crate::vsa::{Backend, Codebook, Hypervector, Space, VsaError};

pub use auc::auc;
pub use report::{emit_report, read_csv_report, read_json_report, CsvRow, ReportFormat, SCHEMA_VERSION};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("AUC: {0}")]
    Auc(String),
    #[error("repetition with seed {seed} failed: {source}")]
    Repetition {
        seed: u64,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub encoder: EncoderConfig,
    pub backend: Backend,
    pub dimensions: usize,
    pub strategy: Strategy,
    pub threshold: f64,
    pub epochs: usize,
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub timing: bool,
}

impl ExperimentConfig {
    /// Star + MAP + RefineHD, `t = 1.8`, `d = 10,000`, ten 80/20 repetitions
    /// with seeds `0..10`.
    pub fn new(dataset: impl Into<String>) -> Self {
        Self {
            dataset: dataset.into(),
            encoder: EncoderConfig::default(),
            backend: Backend::Map,
            dimensions: 10_000,
            strategy: Strategy::RefineHd,
            threshold: DEFAULT_THRESHOLD,
            epochs: 1,
            train_fraction: 0.8,
            seeds: (0..10).collect(),
            timing: true,
        }
    }

    pub fn repetitions(&self) -> usize {
        self.seeds.len()
    }

    pub fn space(&self) -> Result<Space, EvalError> {
        Ok(Space::new(self.backend, self.dimensions)?)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        self.space()?;
        if self.seeds.is_empty() {
            return Err(EvalError::Config("at least one seed is required".into()));
        }
        if self.epochs == 0 {
            return Err(EvalError::Config("epochs must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(EvalError::Config(format!(
                "train fraction {} is not in (0, 1)",
                self.train_fraction
            )));
        }
        if self.strategy == Strategy::RefineHd && !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(EvalError::Config(format!(
                "RefineHD threshold must be positive, got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    /// Short identifier echoing the swept knobs.
    pub fn default_id(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}/t{}/d{}",
            self.dataset,
            self.encoder.kind,
            self.encoder.effective_keying(),
            self.backend,
            self.strategy,
            self.threshold,
            self.dimensions
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub seed: u64,
    pub auc: f64,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    /// Wall clock of encode + train, divided by training samples.
    pub train_ms_per_sample: Option<f64>,
    /// Wall clock of encode + score, divided by test samples.
    pub infer_ms_per_sample: Option<f64>,
}

/// Mean and sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub auc: Summary,
    pub accuracy: Summary,
    pub train_ms_per_sample: Option<Summary>,
    pub infer_ms_per_sample: Option<Summary>,
}

impl Aggregate {
    pub fn of(reps: &[RepetitionResult]) -> Self {
        let col = |f: fn(&RepetitionResult) -> f64| Summary::of(&reps.iter().map(f).collect::<Vec<_>>());
        let opt = |f: fn(&RepetitionResult) -> Option<f64>| {
            reps.iter()
                .map(f)
                .collect::<Option<Vec<_>>>()
                .map(|v| Summary::of(&v))
        };
        Self {
            auc: col(|r| r.auc),
            accuracy: col(|r| r.accuracy),
            train_ms_per_sample: opt(|r| r.train_ms_per_sample),
            infer_ms_per_sample: opt(|r| r.infer_ms_per_sample),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment_id: String,
    pub config: ExperimentConfig,
    pub repetitions: Vec<RepetitionResult>,
    pub aggregate: Aggregate,
    pub library_version: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

impl ExperimentResult {
    /// Mean AUC in the percent convention.
    pub fn auc_percent(&self) -> f64 {
        self.aggregate.auc.mean * 100.0
    }
}

fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Training graphs encoded concurrently before being fed to the memory.
const ENCODE_BATCH: usize = 1024;

fn encode_all(encoder: &EncoderConfig, codebook: &Codebook, dataset: &Dataset, idx: &[usize]) -> Result<Vec<Hypervector>, EncodeError> {
    idx.par_iter()
        .map(|&i| encoder.encode(codebook, &dataset.graphs()[i]))
        .collect()
}

/// Runs every repetition of `config` on `dataset`.
///
/// Binary datasets only: the larger class value is the positive class and
/// test samples are scored with [`AssociativeMemory::score_binary`].
pub fn run_experiment(config: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentResult, EvalError> {
    run_experiment_with_id(config, dataset, config.default_id())
}

pub fn run_experiment_with_id(config: &ExperimentConfig, dataset: &Dataset, experiment_id: String) -> Result<ExperimentResult, EvalError> {
    config.validate()?;
    let classes = dataset.class_values();
    if classes.len() != 2 {
        return Err(EvalError::Config(format!(
            "AUC needs a binary dataset; '{}' has {} classes",
            dataset.name(),
            classes.len()
        )));
    }
    if config.encoder.effective_keying() == NodeKeying::NodeLabel && !dataset.has_node_labels() {
        return Err(EvalError::Config(format!(
            "node-label keying requested but '{}' has no node labels",
            dataset.name()
        )));
    }
    let started = unix_ms();
    let reps = config
        .seeds
        .iter()
        .map(|&seed| {
            run_repetition(config, dataset, seed).map_err(|e| EvalError::Repetition {
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentResult {
        experiment_id,
        config: config.clone(),
        aggregate: Aggregate::of(&reps),
        repetitions: reps,
        library_version: LIBRARY_VERSION.to_owned(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
    })
}

fn run_repetition(config: &ExperimentConfig, dataset: &Dataset, seed: u64) -> Result<RepetitionResult, EvalError> {
    let (negative, positive) = (dataset.class_values()[0], dataset.class_values()[1]);
    let split = stratified_split(dataset, config.train_fraction, seed)?;
    let space = config.space()?;
    let codebook = Codebook::new(space, seed);
    let graphs = dataset.graphs();

    let train_start = Instant::now();
    let mut memory = AssociativeMemory::new(space, config.strategy, config.threshold)?;
    for &c in dataset.class_values() {
        memory.admit_class(c);
    }
    // Encode in parallel batches and train on each batch in split order, so
    // memory stays bounded at large d. Later epochs re-encode (deterministic).
    for _ in 0..config.epochs {
        for chunk in split.train_indices.chunks(ENCODE_BATCH) {
            let encoded = encode_all(&config.encoder, &codebook, dataset, chunk)?;
            let samples = encoded.iter().zip(chunk).map(|(h, &i)| (h, graphs[i].label()));
            memory.train(samples, 1)?;
        }
    }
    let train_elapsed = train_start.elapsed();

    let test_start = Instant::now();
    let scored = split
        .test_indices
        .par_iter()
        .map(|&i| -> Result<(f64, bool), EvalError> {
            let h = config.encoder.encode(&codebook, &graphs[i])?;
            let predicted = memory.predict(&h)?.label;
            let score = memory.score_binary(&h, positive, negative)?;
            Ok((score, predicted == graphs[i].label()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let test_elapsed = test_start.elapsed();

    let scores: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let truth: Vec<bool> = split
        .test_indices
        .iter()
        .map(|&i| graphs[i].label() == positive)
        .collect();
    let correct = scored.iter().filter(|s| s.1).count();
    let per_sample = |elapsed: std::time::Duration, n: usize| {
        config.timing.then(|| elapsed.as_secs_f64() * 1e3 / n.max(1) as f64)
    };
    Ok(RepetitionResult {
        seed,
        auc: auc(&scores, &truth)?,
        accuracy: correct as f64 / scored.len().max(1) as f64,
        n_train: split.train_indices.len(),
        n_test: split.test_indices.len(),
        train_ms_per_sample: per_sample(train_elapsed, split.train_indices.len()),
        infer_ms_per_sample: per_sample(test_elapsed, split.test_indices.len()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Dimensions,
    Threshold,
    Strategy,
    VsaBackend,
    Encoder,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Dimensions => "dims",
            SweepAxis::Threshold => "threshold",
            SweepAxis::Strategy => "strategy",
            SweepAxis::VsaBackend => "vsa",
            SweepAxis::Encoder => "encoder",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dims" | "dimensions" => Ok(SweepAxis::Dimensions),
            "threshold" => Ok(SweepAxis::Threshold),
            "strategy" => Ok(SweepAxis::Strategy),
            "vsa" | "backend" => Ok(SweepAxis::VsaBackend),
            "encoder" => Ok(SweepAxis::Encoder),
            other => Err(format!(
                "unknown sweep axis '{other}' (expected dims, threshold, strategy, vsa or encoder)"
            )),
        }
    }
}

/// Expands `template` along `axis`, validating every value before returning.
///
/// VSA values may pin their own dimensionality as `backend:d`
/// (e.g. `vtb:9801`), since VTB needs a perfect square.
pub fn sweep_configs(template: &ExperimentConfig, axis: SweepAxis, values: &[String]) -> Result<Vec<(String, ExperimentConfig)>, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Config("a sweep needs at least one value".into()));
    }
    let bad = |v: &str, why: String| EvalError::Config(format!("invalid {axis} value '{v}': {why}"));
    let mut out = Vec::with_capacity(values.len());
    for raw in values {
        let v = raw.trim();
        let mut cfg = template.clone();
        match axis {
            SweepAxis::Dimensions => {
                cfg.dimensions = v.replace('_', "").parse().map_err(|e| bad(v, format!("{e}")))?;
            }
            SweepAxis::Threshold => {
                cfg.threshold = v.parse().map_err(|e| bad(v, format!("{e}")))?;
                cfg.strategy = Strategy::RefineHd;
            }
            SweepAxis::Strategy => cfg.strategy = v.parse().map_err(|e| bad(v, e))?,
            SweepAxis::VsaBackend => {
                let (name, dims) = match v.split_once(':') {
                    Some((n, d)) => (n, Some(d.parse::<usize>().map_err(|e| bad(v, format!("{e}")))?)),
                    None => (v, None),
                };
                cfg.backend = name.parse().map_err(|e| bad(v, e))?;
                if let Some(d) = dims {
                    cfg.dimensions = d;
                }
            }
            SweepAxis::Encoder => cfg.encoder.kind = v.parse::<EncoderKind>().map_err(|e| bad(v, e))?,
        }
        cfg.validate().map_err(|e| bad(v, e.to_string()))?;
        out.push((format!("{}={}", axis.name(), v), cfg));
    }
    Ok(out)
}

/// Runs one experiment per axis value with the template's seeds, so every
/// value sees the same splits.
pub fn sweep(template: &ExperimentConfig, axis: SweepAxis, values: &[String], dataset: &Dataset) -> Result<Vec<ExperimentResult>, EvalError> {
    sweep_configs(template, axis, values)?
        .into_iter()
        .map(|(id, cfg)| run_experiment_with_id(&cfg, dataset, id))
        .collect()
}
