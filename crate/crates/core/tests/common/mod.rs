//! Oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use molhd::learner::{AssociativeMemory, Strategy};
use molhd::vsa::{Backend, Hypervector, Space};

pub fn hv(x: &[f64]) -> Hypervector {
    Hypervector::Map(x.to_vec())
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties
/// counting one half.
pub fn pairwise_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &p) in positive.iter().enumerate() {
        for (j, &q) in positive.iter().enumerate() {
            if p && !q {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Straight-line re-statement of the update rules over plain vectors, used
/// as the replay oracle.
#[derive(Default)]
pub struct Replay {
    pub classes: BTreeMap<i64, Vec<f64>>,
    pub recorded: Vec<f64>,
    pub threshold: f64,
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn axpy(acc: &mut [f64], w: f64, x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += w * b;
    }
}

impl Replay {
    fn scores(&self, h: &[f64]) -> Vec<(i64, f64)> {
        self.classes.iter().map(|(&l, c)| (l, cosine(h, c))).collect()
    }

    fn argmax(&self, h: &[f64]) -> (i64, f64) {
        let mut best = (i64::MAX, f64::NEG_INFINITY);
        for (l, s) in self.scores(h) {
            if s > best.1 {
                best = (l, s);
            }
        }
        best
    }

    pub fn step(&mut self, strategy: Strategy, h: &[f64], y: i64) {
        let d = h.len();
        let c_y = self.classes.entry(y).or_insert_with(|| vec![0.0; d]);
        if strategy == Strategy::Add || c_y.iter().all(|&x| x == 0.0) {
            axpy(c_y, 1.0, h);
            return;
        }
        let (pred, s_hat) = self.argmax(h);
        let s_y = cosine(h, &self.classes[&y]);
        let mean = if self.recorded.is_empty() {
            0.0
        } else {
            self.recorded.iter().sum::<f64>() / self.recorded.len() as f64
        };
        match (strategy, pred == y) {
            (Strategy::AdaptHd, false) => {
                axpy(self.classes.get_mut(&y).unwrap(), 1.0, h);
                axpy(self.classes.get_mut(&pred).unwrap(), -1.0, h);
            }
            (Strategy::OnlineHd, false) | (Strategy::RefineHd, false) => {
                if strategy == Strategy::RefineHd {
                    self.recorded.push(s_y);
                }
                axpy(self.classes.get_mut(&y).unwrap(), 1.0 - s_y, h);
                axpy(self.classes.get_mut(&pred).unwrap(), -(1.0 - s_hat), h);
            }
            (Strategy::RefineHd, true) if !self.recorded.is_empty() && s_y < self.threshold * mean => {
                axpy(self.classes.get_mut(&y).unwrap(), 1.0 - s_y, h);
            }
            _ => {}
        }
    }
}

pub fn assert_matches_replay(m: &AssociativeMemory, r: &Replay) {
    assert_eq!(m.classes().len(), r.classes.len());
    for (label, want) in &r.classes {
        let got = m.class_vector(*label).unwrap().flat_components();
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "class {label}: {got:?} vs {want:?}");
        }
    }
}

pub fn run_script(strategy: Strategy, threshold: f64, script: &[(Vec<f64>, i64)]) -> (AssociativeMemory, Replay) {
    let d = script[0].0.len();
    let mut m = AssociativeMemory::new(Space::new(Backend::Map, d).unwrap(), strategy, threshold).unwrap();
    let mut r = Replay {
        threshold,
        ..Replay::default()
    };
    for (x, y) in script {
        m.update(&hv(x), *y).unwrap();
        r.step(strategy, x, *y);
        assert_matches_replay(&m, &r);
    }
    (m, r)
}


/// Eight MAP samples over two classes; under RefineHD with `t = 1.8` exactly
/// two of them are misclassified.
pub fn eight_sample_script() -> Vec<(Vec<f64>, i64)> {
    vec![
        (vec![1.0, 0.0, 0.0, 0.1], 0),
        (vec![0.0, 1.0, 0.0, 0.1], 1),
        (vec![0.9, 0.2, 0.1, 0.0], 0),
        (vec![0.6, 0.5, 0.6, 0.0], 1),
        (vec![0.3, 0.9, 0.1, 0.2], 1),
        (vec![0.2, 0.6, 0.0, 0.9], 0),
        (vec![0.8, 0.3, 0.0, 0.6], 0),
        (vec![0.2, 0.3, 1.0, 0.1], 1),
    ]
}
