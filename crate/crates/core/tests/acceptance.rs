//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1-4 are self-contained. Criteria 5-10 run on the MCF-7
//! anticancer screen, fetched into `$MOLHD_CACHE_DIR` (default: the user
//! cache directory) from `$MOLHD_BASE_URL`. Each fails when the
//! dataset cannot be obtained. Positional arguments select criteria by
//! number, for example `cargo test --test acceptance -- 1 2 3`.

mod common;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use molhd::encode::{encode_star, Centrality, EncoderConfig, EncoderKind, NodeKeying};
use molhd::eval::{auc, run_experiment, ExperimentConfig, ExperimentResult};
use molhd::graph::{default_cache_dir, fetch_dataset, parse_tudataset, Dataset, Graph, DEFAULT_BASE_URL};
use molhd::learner::Strategy;
use molhd::vsa::{Backend, Codebook, Space};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{eight_sample_script, pairwise_auc, run_script};

const MCF7: &str = "MCF-7";
const MCF7_GRAPHS: usize = 28_972;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// --- 1. VSA algebra ------------------------------------------------------

fn vsa_algebra() -> Outcome {
    let start = Instant::now();
    let d = 10_000;
    let mut notes = Vec::new();
    let cb = |b| Codebook::new(Space::new(b, d).unwrap(), 1);
    let (map, fhrr, vtb) = (cb(Backend::Map), cb(Backend::Fhrr), cb(Backend::Vtb));
    let (mut min_fhrr, mut min_vtb) = (f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        let (tx, ty) = (format!("x{i}").into(), format!("y{i}").into());
        let (x, y) = (map.generate(&tx), map.generate(&ty));
        if x.bind(&y).unwrap().bind(&y).unwrap() != x {
            return Err(format!("MAP bind not self-inverse on pair {i}"));
        }
        if x.permute(i).permute(-i) != x {
            return Err(format!("permute({i}) not invertible"));
        }
        let (x, y) = (fhrr.generate(&tx), fhrr.generate(&ty));
        min_fhrr = min_fhrr.min(x.bind(&y).unwrap().unbind(&y).unwrap().similarity(&x).unwrap());
        let (x, y) = (vtb.generate(&tx), vtb.generate(&ty));
        min_vtb = min_vtb.min(x.bind(&y).unwrap().unbind(&y).unwrap().similarity(&x).unwrap());
    }
    notes.push(format!("FHRR recovery min {min_fhrr:.6}"));
    notes.push(format!("VTB recovery min {min_vtb:.6}"));
    let mut ok = min_fhrr >= 0.999 && min_vtb >= 0.90;
    for (name, cb) in [("MAP", &map), ("FHRR", &fhrr), ("VTB", &vtb)] {
        let mut sims: Vec<f64> = (0..1000)
            .map(|i| {
                let a = cb.generate(&format!("a{i}").into());
                let b = cb.generate(&format!("b{i}").into());
                a.similarity(&b).unwrap().abs()
            })
            .collect();
        sims.sort_by(f64::total_cmp);
        let p999 = sims[((sims.len() - 1) as f64 * 0.999).round() as usize];
        ok &= p999 < 0.05;
        notes.push(format!("{name} |cos| p99.9 {p999:.4}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    check(ok, format!("{} (limit 60s)", notes.join(", ")))
}

// --- 2. AUC oracle -------------------------------------------------------

fn auc_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for trial in 0..10_000 {
        let n = rng.gen_range(2..=50);
        let levels = if trial % 2 == 0 { 5 } else { 1 << 30 };
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let mut positive: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        positive[0] = true;
        positive[n - 1] = false;
        let got = auc(&scores, &positive).map_err(|e| e.to_string())?;
        worst = worst.max((got - pairwise_auc(&scores, &positive)).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(60),
        format!("10000 instances, max |diff| {worst:e} (limit 60s)"),
    )
}

// --- 3. Encoder oracle ---------------------------------------------------

fn encoder_oracle() -> Outcome {
    let cb = Codebook::new(Space::new(Backend::Map, 10_000).unwrap(), 3);
    let p = |l: i64| cb.get(format!("L:{l}")).flat_components();
    let (a, b, c) = (p(1), p(2), p(3));
    let path = Graph::new(3, [(0, 1), (1, 2)], Some(vec![1, 2, 3]), 0).unwrap();
    let star = Graph::new(3, [(0, 1), (0, 2)], Some(vec![1, 2, 3]), 0).unwrap();
    let enc = |g: &Graph, cb: &Codebook| encode_star(cb, NodeKeying::NodeLabel, g).unwrap();
    let want_path: Vec<f64> = (0..a.len())
        .map(|i| a[i] * b[i] + b[i] * a[i] * c[i] + c[i] * b[i])
        .collect();
    let want_star: Vec<f64> = (0..a.len())
        .map(|i| a[i] * b[i] * c[i] + b[i] * a[i] + c[i] * a[i])
        .collect();
    if enc(&path, &cb).flat_components() != want_path {
        return Err("3-path differs from the direct expansion".into());
    }
    if enc(&star, &cb).flat_components() != want_star {
        return Err("3-star differs from the direct expansion".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fhrr = Codebook::new(Space::new(Backend::Fhrr, 4_096).unwrap(), 3);
    for k in 0..100 {
        let n = rng.gen_range(1..30);
        let mut edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for _ in 0..rng.gen_range(0..6) {
            edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
        let labels = (0..n).map(|_| rng.gen_range(0..8)).collect();
        let g = Graph::new(n, edges, Some(labels), 0).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = g.relabel_nodes(&perm).unwrap();
        for cb in [&cb, &fhrr] {
            if enc(&g, cb).to_bytes() != enc(&h, cb).to_bytes() {
                return Err(format!("graph {k}: reindexing changed the {} encoding", cb.space().backend()));
            }
        }
    }
    Ok("path and star bitwise equal; 100 reindexed graphs bitwise invariant (MAP, FHRR)".into())
}

// --- 4. Strategy replay --------------------------------------------------

fn strategy_replay() -> Outcome {
    let script = eight_sample_script();
    let mut notes = Vec::new();
    for strategy in [Strategy::AdaptHd, Strategy::OnlineHd, Strategy::RefineHd] {
        // run_script asserts agreement within 1e-9 after every step.
        let outcome = std::panic::catch_unwind(|| run_script(strategy, 1.8, &script));
        let (memory, replay) = outcome.map_err(|_| format!("{strategy}: memory diverged from replay"))?;
        if strategy == Strategy::RefineHd {
            let stats = memory.mis_stats();
            let mean = replay.recorded.iter().sum::<f64>() / replay.recorded.len().max(1) as f64;
            if stats.count as usize != replay.recorded.len() || (stats.mean() - mean).abs() > 1e-12 {
                return Err(format!("RefineHD mu {} vs replayed {mean}", stats.mean()));
            }
            notes.push(format!("RefineHD {} errors, mu {:.6}", stats.count, stats.mean()));
        }
    }
    Ok(format!("AdaptHD/OnlineHD/RefineHD match replay within 1e-9; {}", notes.join("")))
}

// --- MCF-7 experiments ---------------------------------------------------

fn mcf7() -> Result<&'static Dataset, String> {
    static DATA: OnceLock<Result<Dataset, String>> = OnceLock::new();
    DATA.get_or_init(|| {
        let cache = std::env::var_os("MOLHD_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(default_cache_dir);
        let base = std::env::var("MOLHD_BASE_URL").unwrap_or_else(|_| DEFAULT_BASE_URL.to_owned());
        let dir = fetch_dataset(MCF7, &cache, &base).map_err(|e| format!("dataset unavailable: {e}"))?;
        let ds = parse_tudataset(&dir, MCF7).map_err(|e| format!("dataset unreadable: {e}"))?;
        if ds.len() != MCF7_GRAPHS {
            return Err(format!("expected {MCF7_GRAPHS} graphs, found {}", ds.len()));
        }
        Ok(ds)
    })
    .as_ref()
    .map_err(Clone::clone)
}

/// Runs (or reuses) the experiment for `config` on MCF-7.
fn experiment(config: ExperimentConfig) -> Result<ExperimentResult, String> {
    static RUNS: OnceLock<std::sync::Mutex<HashMap<String, ExperimentResult>>> = OnceLock::new();
    let key = config.default_id();
    let runs = RUNS.get_or_init(Default::default);
    if let Some(r) = runs.lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let ds = mcf7()?;
    eprintln!("  running {key} ...");
    let start = Instant::now();
    let r = run_experiment(&config, ds).map_err(|e| format!("{key}: {e}"))?;
    eprintln!(
        "  {key}: AUC {:.2} ({:.0}s)",
        r.auc_percent(),
        start.elapsed().as_secs_f64()
    );
    runs.lock().unwrap().insert(key, r.clone());
    Ok(r)
}

fn base() -> ExperimentConfig {
    ExperimentConfig::new(MCF7)
}

fn with_strategy(strategy: Strategy) -> ExperimentConfig {
    ExperimentConfig { strategy, ..base() }
}

fn auc_of(config: ExperimentConfig) -> Result<f64, String> {
    Ok(experiment(config)?.auc_percent())
}

fn train_ms(r: &ExperimentResult) -> f64 {
    r.aggregate.train_ms_per_sample.map_or(f64::NAN, |s| s.mean)
}

fn infer_ms(r: &ExperimentResult) -> f64 {
    r.aggregate.infer_ms_per_sample.map_or(f64::NAN, |s| s.mean)
}

fn headline() -> Outcome {
    let refine = auc_of(base())?;
    let add = auc_of(with_strategy(Strategy::Add))?;
    check(
        (refine - 88.43).abs() <= 4.0 && (add - 54.64).abs() <= 6.0,
        format!("RefineHD {refine:.2} (target 88.43 ± 4.0), Add {add:.2} (target 54.64 ± 6.0)"),
    )
}

fn strategy_ordering() -> Outcome {
    let refine = auc_of(base())?;
    let add = auc_of(with_strategy(Strategy::Add))?;
    let adapt = auc_of(with_strategy(Strategy::AdaptHd))?;
    let online = auc_of(with_strategy(Strategy::OnlineHd))?;
    check(
        refine > online && online >= add && refine > adapt && adapt >= add && refine - add >= 20.0,
        format!("RefineHD {refine:.2}, OnlineHD {online:.2}, AdaptHD {adapt:.2}, Add {add:.2}; gap {:.2} (need ≥ 20)", refine - add),
    )
}

fn threshold_sweep() -> Outcome {
    let t18 = auc_of(base())?;
    let t10 = auc_of(ExperimentConfig {
        threshold: 1.0,
        ..base()
    })?;
    check(
        t18 >= t10 - 0.3,
        format!("t=1.8 {t18:.2} vs t=1.0 {t10:.2} (need ≥ t=1.0 − 0.3)"),
    )
}

fn vsa_parity() -> Outcome {
    let runs = [(Backend::Map, 10_000), (Backend::Fhrr, 10_000), (Backend::Vtb, 9_801)]
        .into_iter()
        .map(|(backend, dimensions)| {
            experiment(ExperimentConfig {
                backend,
                dimensions,
                ..base()
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let aucs: Vec<f64> = runs.iter().map(ExperimentResult::auc_percent).collect();
    let spread = aucs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - aucs.iter().cloned().fold(f64::INFINITY, f64::min);
    let times: Vec<f64> = runs.iter().map(train_ms).collect();
    let map_fastest = times[0] < times[1] && times[0] < times[2];
    check(
        spread <= 2.5 && map_fastest,
        format!(
            "AUC MAP {:.2} / FHRR {:.2} / VTB {:.2} (spread {spread:.2}, need ≤ 2.5); train ms/sample {:.4} / {:.4} / {:.4}",
            aucs[0], aucs[1], aucs[2], times[0], times[1], times[2]
        ),
    )
}

fn scalability() -> Outcome {
    let dims = [5_000usize, 10_000, 25_000, 50_000];
    let runs = dims
        .iter()
        .map(|&dimensions| experiment(ExperimentConfig { dimensions, ..base() }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, time) in [("train", train_ms as fn(&ExperimentResult) -> f64), ("infer", infer_ms)] {
        let t: Vec<f64> = runs.iter().map(time).collect();
        for i in 1..t.len() {
            ok &= t[i] > t[i - 1];
            let linear = dims[i] as f64 / dims[0] as f64;
            let ratio = t[i] / t[0];
            ok &= ratio >= 0.5 * linear && ratio <= 2.0 * linear;
        }
        notes.push(format!(
            "{name} ms/sample {}",
            t.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" / ")
        ));
    }
    let aucs: Vec<f64> = runs.iter().map(ExperimentResult::auc_percent).collect();
    ok &= aucs.windows(2).all(|w| w[1] >= w[0] - 0.5);
    notes.push(format!(
        "AUC {}",
        aucs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" / ")
    ));
    check(ok, notes.join("; "))
}

fn baseline_gap() -> Outcome {
    let star = auc_of(base())?;
    let encoder = |kind| ExperimentConfig {
        encoder: EncoderConfig {
            kind,
            keying: NodeKeying::NodeIdRandom,
        },
        ..base()
    };
    let gl = auc_of(encoder(EncoderKind::GaylerLevy))?;
    let ghd = auc_of(encoder(EncoderKind::GraphHd(Centrality::PageRank)))?;
    check(
        star - gl >= 10.0 && star - ghd >= 10.0 && gl >= ghd - 1.5,
        format!("Star {star:.2}, Gayler & Levy {gl:.2}, GraphHD(PageRank) {ghd:.2}"),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "VSA algebra suite", vsa_algebra),
        (2, "AUC oracle", auc_oracle),
        (3, "encoder oracle", encoder_oracle),
        (4, "strategy replay", strategy_replay),
        (5, "MCF-7 headline AUC", headline),
        (6, "MCF-7 strategy ordering", strategy_ordering),
        (7, "MCF-7 threshold sweep", threshold_sweep),
        (8, "MCF-7 VSA parity", vsa_parity),
        (9, "MCF-7 scalability shape", scalability),
        (10, "MCF-7 baseline-encoder gap", baseline_gap),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();

    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {id:>2}: {name} — {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {id:>2}: {name} — {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
