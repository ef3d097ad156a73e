//! `molhd` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable dataset, failed download, incompatible model), 3 runtime error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use molhd::encode::{EncodeError, EncoderConfig, EncoderKind, NodeKeying};
use molhd::eval::{
    emit_report, run_experiment, sweep, sweep_configs, EvalError, ExperimentConfig, ExperimentResult, ReportFormat,
    SweepAxis,
};
use molhd::graph::{
    default_cache_dir, discover_name, fetch_dataset, parse_tudataset, read_tudataset, Dataset, GraphError,
    DEFAULT_BASE_URL,
};
use molhd::learner::{AssociativeMemory, LearnError, Model, Strategy, DEFAULT_THRESHOLD};
use molhd::vsa::{Backend, Codebook, Space, VsaError};
use rayon::prelude::*;

/// Anticancer screens served by the default base URL, with graph counts.
const ANTICANCER: [(&str, usize, &str); 11] = [
    ("MCF-7", 28_972, "Breast"),
    ("MOLT-4", 41_810, "Leukemia"),
    ("NCI-H23", 42_164, "Non-small cell lung"),
    ("OVCAR-8", 42_386, "Ovarian"),
    ("PC-3", 28_679, "Prostate"),
    ("P388", 46_440, "Leukemia"),
    ("SF-295", 40_350, "Central nervous system"),
    ("SN12C", 41_855, "Renal"),
    ("SW-620", 42_405, "Colon"),
    ("UACC-257", 41_864, "Melanoma"),
    ("Yeast", 83_933, "Yeast anticancer"),
];

/// Graphs encoded concurrently before being fed to the memory.
const ENCODE_BATCH: usize = 1024;

#[derive(Parser)]
#[command(name = "molhd", version, about = "Hyperdimensional graph classification")]
struct Cli {
    /// Worker threads for encoding and scoring [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download a TUDataset archive into the cache and print its directory
    Fetch {
        /// Dataset name, e.g. MCF-7
        name: String,
        #[command(flatten)]
        source: Source,
    },
    /// Train on a whole dataset and write a model file
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Codebook seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output model file
        #[arg(long, short, default_value = "model.hdm")]
        out: PathBuf,
    },
    /// Classify every graph of a dataset with a trained model
    Predict {
        /// Model file written by `train`
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Run repeated train/test experiments and report AUC
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: Protocol,
    },
    /// Run one experiment per value of a configuration axis
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: Protocol,
        /// Axis to vary: dims, threshold, strategy, vsa or encoder
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values (vsa values may pin d, e.g. vtb:9801)
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// List the anticancer datasets available from the default source
    ListDatasets,
}

#[derive(Args)]
struct Source {
    /// Cache directory for downloaded archives [default: user cache dir/molhd]
    #[arg(long, env = "MOLHD_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Base URL serving `{name}.zip`
    #[arg(long, env = "MOLHD_BASE_URL", default_value = DEFAULT_BASE_URL)]
    base_url: String,
}

impl Source {
    fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(default_cache_dir)
    }
}

#[derive(Args)]
struct DataArgs {
    /// TUDataset directory, or a dataset name to fetch
    dataset: String,
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct ModelArgs {
    /// Graph encoder: star, gayler-levy, graphhd-pagerank or graphhd-degree
    #[arg(long, default_value = "star")]
    encoder: EncoderKind,
    /// Node vectors of the star encoder: node-label, degree or node-id-random
    #[arg(long, default_value = "node-label")]
    keying: NodeKeying,
    /// Vector symbolic architecture: map, fhrr or vtb
    #[arg(long, default_value = "map")]
    vsa: Backend,
    /// Hypervector dimensionality (a perfect square for vtb)
    #[arg(long, default_value_t = 10_000)]
    dims: usize,
    /// Training rule: add, adapthd, onlinehd or refinehd
    #[arg(long, default_value = "refinehd")]
    strategy: Strategy,
    /// RefineHD threshold factor [default: 1.8]
    #[arg(long)]
    threshold: Option<f64>,
    /// Passes over the training data
    #[arg(long, default_value_t = 1)]
    epochs: usize,
}

impl ModelArgs {
    fn encoder(&self) -> EncoderConfig {
        EncoderConfig {
            kind: self.encoder,
            keying: self.keying,
        }
    }

    fn threshold(&self) -> Result<f64, CliError> {
        match self.threshold {
            Some(_) if self.strategy != Strategy::RefineHd => Err(CliError::usage(format!(
                "--threshold only applies to the refinehd strategy, not {}",
                self.strategy
            ))),
            Some(t) => Ok(t),
            None => Ok(DEFAULT_THRESHOLD),
        }
    }

    fn space(&self) -> Result<Space, CliError> {
        Space::new(self.vsa, self.dims).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Args)]
struct Protocol {
    /// Repetitions, seeded 0..reps
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Explicit comma-separated seeds (overrides --reps)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Fraction of each class used for training
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Skip per-sample timing
    #[arg(long)]
    no_timing: bool,
    /// Report file; .json writes JSON, anything else CSV
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl Protocol {
    fn config(&self, dataset: &str, model: &ModelArgs) -> Result<ExperimentConfig, CliError> {
        let config = ExperimentConfig {
            dataset: dataset.to_owned(),
            encoder: model.encoder(),
            backend: model.vsa,
            dimensions: model.dims,
            strategy: model.strategy,
            threshold: model.threshold()?,
            epochs: model.epochs,
            train_fraction: self.train_fraction,
            seeds: self.seeds.clone().unwrap_or_else(|| (0..self.reps).collect()),
            timing: !self.no_timing,
        };
        config.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn data(message: impl fmt::Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }

    fn runtime(message: impl fmt::Display) -> Self {
        Self {
            code: 3,
            message: message.to_string(),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(_) => Self::runtime(e),
            _ => Self::data(e),
        }
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> Self {
        match e {
            EncodeError::Vsa(_) => Self::runtime(e),
            _ => Self::data(e),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::InvalidThreshold(_) | LearnError::InvalidEpochs => Self::usage(e.to_string()),
            LearnError::Format(_) => Self::data(e),
            _ => Self::runtime(e),
        }
    }
}

fn eval_exit_code(e: &EvalError) -> u8 {
    match e {
        EvalError::Config(_) | EvalError::Vsa(VsaError::InvalidDimension { .. }) => 1,
        EvalError::Graph(_) | EvalError::Encode(_) | EvalError::Auc(_) => 2,
        EvalError::Repetition { source, .. } => eval_exit_code(source),
        _ => 3,
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        Self {
            code: eval_exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn dataset_location(data: &DataArgs) -> Result<(PathBuf, String), CliError> {
    let path = Path::new(&data.dataset);
    if path.is_dir() {
        let name = discover_name(path)?;
        Ok((path.to_path_buf(), name))
    } else {
        let dir = fetch_dataset(&data.dataset, &data.source.cache_dir(), &data.source.base_url)?;
        Ok((dir, data.dataset.clone()))
    }
}

fn load_dataset(data: &DataArgs) -> Result<Dataset, CliError> {
    let (dir, name) = dataset_location(data)?;
    let ds = parse_tudataset(&dir, &name)?;
    log::info!("loaded {} ({} graphs)", ds.name(), ds.len());
    Ok(ds)
}

fn require_labels(keying: NodeKeying, has_labels: bool, what: &str) -> Result<(), CliError> {
    if keying == NodeKeying::NodeLabel && !has_labels {
        return Err(CliError::data(format!(
            "{what} has no node labels but the encoder is keyed on node labels (try --keying degree)"
        )));
    }
    Ok(())
}

fn cmd_fetch(name: &str, source: &Source) -> Result<(), CliError> {
    let dir = fetch_dataset(name, &source.cache_dir(), &source.base_url)?;
    println!("{}", dir.display());
    Ok(())
}

fn cmd_train(data: &DataArgs, model: &ModelArgs, seed: u64, out: &Path) -> Result<(), CliError> {
    let space = model.space()?;
    let threshold = model.threshold()?;
    let mut memory = AssociativeMemory::new(space, model.strategy, threshold)?;
    if model.epochs == 0 {
        return Err(CliError::usage("--epochs must be at least 1"));
    }
    let ds = load_dataset(data)?;
    let encoder = model.encoder();
    require_labels(encoder.effective_keying(), ds.has_node_labels(), ds.name())?;
    let codebook = Codebook::new(space, seed);
    for &c in ds.class_values() {
        memory.admit_class(c);
    }
    for _ in 0..model.epochs {
        for chunk in ds.graphs().chunks(ENCODE_BATCH) {
            let encoded = chunk
                .par_iter()
                .map(|g| encoder.encode(&codebook, g))
                .collect::<Result<Vec<_>, _>>()?;
            memory.train(encoded.iter().zip(chunk).map(|(h, g)| (h, g.label())), 1)?;
        }
    }
    let model = Model { memory, encoder, seed };
    model.save(out)?;
    println!(
        "trained {} on {} graphs ({} classes, {} {} d={}) -> {}",
        model.memory.strategy(),
        ds.len(),
        ds.class_values().len(),
        encoder.kind,
        space.backend(),
        space.dimensions(),
        out.display()
    );
    Ok(())
}

fn cmd_predict(model_path: &Path, data: &DataArgs) -> Result<(), CliError> {
    let model = Model::load(model_path)?;
    let (dir, name) = dataset_location(data)?;
    let raw = read_tudataset(&dir, &name)?;
    let keying = model.encoder.effective_keying();
    let labelled = raw.graphs.iter().all(|g| g.is_empty() || g.node_labels().is_some());
    require_labels(keying, labelled, &name)?;
    let codebook = Codebook::new(model.memory.space(), model.seed);
    let lines = raw
        .graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| match model.encoder.encode(&codebook, g) {
            Ok(h) => {
                let p = model.memory.predict(&h).map_err(CliError::from)?;
                let scores: Vec<String> = p.scores.iter().map(|(c, s)| format!("{c}={s:.6}")).collect();
                Ok((format!("{i}\t{}\t{}", p.label, scores.join("\t")), false))
            }
            Err(EncodeError::EmptyGraph) => Ok((format!("{i}\terror\tempty graph"), true)),
            Err(e) => Err(CliError::from(e)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut failed = 0;
    for (line, is_error) in lines {
        println!("{line}");
        failed += usize::from(is_error);
    }
    if failed > 0 {
        return Err(CliError::data(format!("{failed} graph(s) could not be classified")));
    }
    Ok(())
}

fn print_table(results: &[ExperimentResult]) {
    let fmt_ms = |s: Option<molhd::eval::Summary>| s.map_or("-".to_owned(), |s| format!("{:.4}", s.mean));
    let width = results.iter().map(|r| r.experiment_id.len()).max().unwrap_or(0).max(10);
    println!(
        "{:<width$}  {:>4}  {:>14}  {:>14}  {:>12}  {:>12}",
        "experiment", "reps", "AUC %", "accuracy %", "train ms", "infer ms"
    );
    for r in results {
        let a = &r.aggregate;
        println!(
            "{:<width$}  {:>4}  {:>14}  {:>14}  {:>12}  {:>12}",
            r.experiment_id,
            r.repetitions.len(),
            format!("{:.2} ± {:.2}", a.auc.mean * 100.0, a.auc.std * 100.0),
            format!("{:.2} ± {:.2}", a.accuracy.mean * 100.0, a.accuracy.std * 100.0),
            fmt_ms(a.train_ms_per_sample),
            fmt_ms(a.infer_ms_per_sample),
        );
    }
}

fn report(results: &[ExperimentResult], out: Option<&Path>) -> Result<(), CliError> {
    print_table(results);
    if let Some(path) = out {
        emit_report(results, ReportFormat::from_path(path), path)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_eval(data: &DataArgs, model: &ModelArgs, protocol: &Protocol) -> Result<(), CliError> {
    // Validate flags before any dataset access.
    protocol.config(&data.dataset, model)?;
    let ds = load_dataset(data)?;
    let config = protocol.config(ds.name(), model)?;
    let result = run_experiment(&config, &ds)?;
    report(&[result], protocol.out.as_deref())
}

fn cmd_sweep(
    data: &DataArgs,
    model: &ModelArgs,
    protocol: &Protocol,
    axis: SweepAxis,
    values: &[String],
) -> Result<(), CliError> {
    let template = protocol.config(&data.dataset, model)?;
    sweep_configs(&template, axis, values)?;
    let ds = load_dataset(data)?;
    let template = ExperimentConfig {
        dataset: ds.name().to_owned(),
        ..template
    };
    let results = sweep(&template, axis, values, &ds)?;
    report(&results, protocol.out.as_deref())
}

fn cmd_list_datasets() {
    println!("{:<10}  {:>7}  cell line", "name", "graphs");
    for (name, graphs, line) in ANTICANCER {
        println!("{name:<10}  {graphs:>7}  {line}");
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    match &cli.command {
        Command::Fetch { name, source } => cmd_fetch(name, source),
        Command::Train {
            data,
            model,
            seed,
            out,
        } => cmd_train(data, model, *seed, out),
        Command::Predict { model, data } => cmd_predict(model, data),
        Command::Eval { data, model, protocol } => cmd_eval(data, model, protocol),
        Command::Sweep {
            data,
            model,
            protocol,
            axis,
            values,
        } => cmd_sweep(data, model, protocol, *axis, values),
        Command::ListDatasets => {
            cmd_list_datasets();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
