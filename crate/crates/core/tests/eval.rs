mod common;

use molhd::encode::{EncoderConfig, EncoderKind, NodeKeying};
use molhd::eval::{
    auc, emit_report, read_csv_report, read_json_report, run_experiment, sweep, sweep_configs, EvalError,
    ExperimentConfig, ReportFormat, SweepAxis,
};
use molhd::graph::stratified_split;
use molhd::learner::Strategy;
use molhd::synth::motif_dataset;
use molhd::vsa::Backend;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::pairwise_auc;

#[test]
fn auc_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..20_000 {
        let n = rng.gen_range(2..=50);
        // Coarse scores on some trials to exercise ties.
        let levels = if trial % 2 == 0 { 4 } else { 1_000_000 };
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64 / levels as f64).collect();
        let mut positive: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        positive[0] = true;
        positive[1] = false;
        let got = auc(&scores, &positive).unwrap();
        let want = pairwise_auc(&scores, &positive);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert_eq!(auc(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
    assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
    assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
}

fn quick_config(strategy: Strategy) -> ExperimentConfig {
    let mut c = ExperimentConfig::new("motif");
    c.dimensions = 2_048;
    c.strategy = strategy;
    c.seeds = vec![0, 1, 2];
    c
}

#[test]
fn separable_motif_dataset_scores_high_auc() {
    let ds = motif_dataset("motif", 200, 4);
    let mut c = ExperimentConfig::new("motif");
    c.seeds = vec![0, 1];
    let r = run_experiment(&c, &ds).unwrap();
    for rep in &r.repetitions {
        assert!(rep.auc >= 0.95, "seed {}: {}", rep.seed, rep.auc);
        assert_eq!((rep.n_train, rep.n_test), (160, 40));
    }
}

#[test]
fn repetitions_are_deterministic_given_seeds() {
    let ds = motif_dataset("motif", 60, 2);
    let mut c = quick_config(Strategy::RefineHd);
    c.seeds = vec![0, 1];
    c.timing = false;
    let a = run_experiment(&c, &ds).unwrap();
    let b = run_experiment(&c, &ds).unwrap();
    assert_eq!(a.repetitions.len(), 2);
    assert_eq!(a.repetitions, b.repetitions);
    assert!(a.repetitions.iter().all(|r| r.train_ms_per_sample.is_none()));
}

#[test]
fn parallelism_does_not_change_results() {
    let ds = motif_dataset("motif", 60, 3);
    let mut c = quick_config(Strategy::OnlineHd);
    c.timing = false;
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| run_experiment(&c, &ds).unwrap());
    let b = run_experiment(&c, &ds).unwrap();
    assert_eq!(a.repetitions, b.repetitions);
}

#[test]
fn sweeps_share_splits_across_values() {
    let ds = motif_dataset("motif", 50, 5);
    let mut c = quick_config(Strategy::Add);
    c.timing = false;
    for seed in &c.seeds {
        assert_eq!(
            stratified_split(&ds, c.train_fraction, *seed).unwrap(),
            stratified_split(&ds, c.train_fraction, *seed).unwrap()
        );
    }
    let results = sweep(&c, SweepAxis::Dimensions, &["256".into(), "1024".into()], &ds).unwrap();
    assert_eq!(results.len(), 2);
    for (a, b) in results[0].repetitions.iter().zip(&results[1].repetitions) {
        assert_eq!((a.seed, a.n_train, a.n_test), (b.seed, b.n_train, b.n_test));
    }
    assert_eq!(results[1].config.dimensions, 1024);

    let strategies = sweep(
        &c,
        SweepAxis::Strategy,
        &["add".into(), "adapthd".into(), "onlinehd".into(), "refinehd".into()],
        &ds,
    )
    .unwrap();
    let names: Vec<_> = strategies.iter().map(|r| r.config.strategy).collect();
    assert_eq!(names, Strategy::ALL.to_vec());
}

#[test]
fn invalid_sweep_values_fail_before_running() {
    let c = quick_config(Strategy::RefineHd);
    for (axis, good, bad) in [
        (SweepAxis::Dimensions, "1024", "ten"),
        (SweepAxis::Threshold, "1.5", "-1"),
        (SweepAxis::Strategy, "add", "boost"),
        (SweepAxis::VsaBackend, "fhrr", "vtb:10001"),
        (SweepAxis::Encoder, "star", "wl"),
    ] {
        assert!(sweep_configs(&c, axis, &[good.to_owned()]).is_ok(), "{axis:?} {good}");
        assert!(sweep_configs(&c, axis, &[good.to_owned(), bad.to_owned()]).is_err(), "{axis:?} {bad}");
    }
    let configs = sweep_configs(&c, SweepAxis::VsaBackend, &["map".into(), "vtb:9801".into(), "fhrr".into()]).unwrap();
    assert_eq!(configs[1].1.backend, Backend::Vtb);
    assert_eq!(configs[1].1.dimensions, 9_801);
    assert!(sweep_configs(&c, SweepAxis::Threshold, &[]).is_err());
}

#[test]
fn experiment_preconditions() {
    let ds = motif_dataset("motif", 20, 6);
    let mut c = quick_config(Strategy::RefineHd);
    c.backend = Backend::Vtb;
    c.dimensions = 10_001;
    assert!(matches!(run_experiment(&c, &ds), Err(EvalError::Vsa(_))));

    let mut c = quick_config(Strategy::Add);
    c.seeds.clear();
    assert!(matches!(run_experiment(&c, &ds), Err(EvalError::Config(_))));

    let unlabeled = molhd::graph::Dataset::new(
        "u",
        (0..20)
            .map(|i| {
                let edges = if i % 2 == 0 { vec![(0, 1), (1, 2)] } else { vec![(0, 1), (1, 2), (0, 2)] };
                molhd::graph::Graph::new(3, edges, None, i % 2).unwrap()
            })
            .collect(),
    )
    .unwrap();
    let c = quick_config(Strategy::Add);
    assert!(matches!(run_experiment(&c, &unlabeled), Err(EvalError::Config(_))));
    let mut degree = c.clone();
    degree.encoder = EncoderConfig {
        kind: EncoderKind::Star,
        keying: NodeKeying::Degree,
    };
    degree.seeds = vec![0];
    assert!(run_experiment(&degree, &unlabeled).is_ok());
}

#[test]
fn reports_round_trip_and_recompute() {
    let ds = motif_dataset("motif", 60, 7);
    let mut c = quick_config(Strategy::RefineHd);
    c.seeds = (0..10).collect();
    let r = run_experiment(&c, &ds).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let csv = dir.path().join("out.csv");
    emit_report(std::slice::from_ref(&r), ReportFormat::from_path(&csv), &csv).unwrap();
    let rows = read_csv_report(&csv).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows.iter().filter(|r| r.agg == "mean").count(), 1);
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with(
        "experiment_id,dataset,encoder,keying,backend,strategy,threshold,dimensions,seed,agg,auc,accuracy,train_ms_per_sample,infer_ms_per_sample"
    ));
    let data: Vec<f64> = rows.iter().filter(|r| r.agg.is_empty()).map(|r| r.auc).collect();
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let agg = rows.iter().find(|r| r.agg == "mean").unwrap();
    assert!((agg.auc - mean).abs() < 1e-9);
    assert!((r.aggregate.auc.mean - mean).abs() < 1e-9);
    let sd = (data.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
    assert!((r.aggregate.auc.std - sd).abs() < 1e-12);

    let json = dir.path().join("out.json");
    assert_eq!(ReportFormat::from_path(&json), ReportFormat::Json);
    emit_report(std::slice::from_ref(&r), ReportFormat::Json, &json).unwrap();
    let back = read_json_report(&json).unwrap();
    assert_eq!(back, vec![r.clone()]);
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(raw["schema"], 1);

    assert!(emit_report(&[r], ReportFormat::Csv, &dir.path().join("missing/out.csv")).is_err());
}

#[test]
fn add_inference_time_is_same_order_as_training() {
    let ds = motif_dataset("motif", 200, 8);
    let mut c = ExperimentConfig::new("motif");
    c.strategy = Strategy::Add;
    c.seeds = vec![0, 1, 2];
    let r = run_experiment(&c, &ds).unwrap();
    let train = r.aggregate.train_ms_per_sample.unwrap().mean;
    let infer = r.aggregate.infer_ms_per_sample.unwrap().mean;
    let ratio = infer / train;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "train {train} ms, infer {infer} ms");
}
