//! Associative-memory classifier.
//!
//! A memory holds one accumulator hypervector per class. Training folds the
//! encoded samples into the accumulators with one of four update rules and
//! inference picks the class of highest cosine similarity.
//!
//! Conventions shared by all rules:
//!
//! - The similarity of anything to a zero accumulator is 0.
//! - A sample whose class accumulator is still zero is added unconditionally
//!   (there is no meaningful prediction to adapt to yet).
//! - Argmax ties go to the smallest class label.

mod model;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vsa::{Hypervector, Space, VsaError};

pub use model::{Model, FORMAT_VERSION, MAGIC};

/// Best-performing RefineHD threshold factor.
pub const DEFAULT_THRESHOLD: f64 = 1.8;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("memory is untrained: every class accumulator is zero")]
    Untrained,
    #[error("class {0} is not present in the memory")]
    UnknownClass(i64),
    #[error("RefineHD threshold must be positive, got {0}")]
    InvalidThreshold(f64),
    #[error("epoch count must be at least 1")]
    InvalidEpochs,
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Every sample is added to its class.
    Add,
    /// Misclassified samples are added to their class and subtracted from
    /// the predicted one.
    AdaptHd,
    /// As AdaptHD, weighted by `1 - similarity`.
    OnlineHd,
    /// As OnlineHD, plus correctly classified samples whose similarity to
    /// their class falls below `threshold * mean misclassified similarity`.
    RefineHd,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Add, Strategy::AdaptHd, Strategy::OnlineHd, Strategy::RefineHd];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Add => "add",
            Strategy::AdaptHd => "adapthd",
            Strategy::OnlineHd => "onlinehd",
            Strategy::RefineHd => "refinehd",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Strategy::Add => 1,
            Strategy::AdaptHd => 2,
            Strategy::OnlineHd => 3,
            Strategy::RefineHd => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Strategy::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "add" | "baseline" => Ok(Strategy::Add),
            "adapthd" => Ok(Strategy::AdaptHd),
            "onlinehd" => Ok(Strategy::OnlineHd),
            "refinehd" => Ok(Strategy::RefineHd),
            other => Err(format!(
                "unknown strategy '{other}' (expected add, adapthd, onlinehd or refinehd)"
            )),
        }
    }
}

/// Running statistics of `similarity(H, C_y)` over misclassified samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MisStats {
    pub count: u64,
    pub sum: f64,
}

impl MisStats {
    /// Mean of the recorded similarities; 0 before the first record.
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    fn record(&mut self, similarity: f64) {
        self.count += 1;
        self.sum += similarity;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: i64,
    /// `(class, similarity)` in ascending class order.
    pub scores: Vec<(i64, f64)>,
    /// Top score minus runner-up; infinite for a single-class memory.
    pub margin: f64,
}

/// Similarity with the zero-accumulator convention.
fn delta(h: &Hypervector, c: &Hypervector) -> Result<f64, VsaError> {
    match h.similarity(c) {
        Err(VsaError::ZeroNorm) => Ok(0.0),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssociativeMemory {
    space: Space,
    strategy: Strategy,
    threshold: f64,
    classes: BTreeMap<i64, Hypervector>,
    mis_stats: MisStats,
}

impl AssociativeMemory {
    /// `threshold` is only used by RefineHD but must be positive for it.
    pub fn new(space: Space, strategy: Strategy, threshold: f64) -> Result<Self, LearnError> {
        if strategy == Strategy::RefineHd && !(threshold > 0.0 && threshold.is_finite()) {
            return Err(LearnError::InvalidThreshold(threshold));
        }
        Ok(Self {
            space,
            strategy,
            threshold,
            classes: BTreeMap::new(),
            mis_stats: MisStats::default(),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn mis_stats(&self) -> MisStats {
        self.mis_stats
    }

    pub fn classes(&self) -> &BTreeMap<i64, Hypervector> {
        &self.classes
    }

    pub fn class_vector(&self, label: i64) -> Option<&Hypervector> {
        self.classes.get(&label)
    }

    /// Adds a zero accumulator for `label` if it is not present yet.
    pub fn admit_class(&mut self, label: i64) {
        self.classes
            .entry(label)
            .or_insert_with(|| Hypervector::zero(self.space));
    }

    fn check_space(&self, h: &Hypervector) -> Result<(), VsaError> {
        if h.backend() != self.space.backend() {
            return Err(VsaError::BackendMismatch {
                left: self.space.backend(),
                right: h.backend(),
            });
        }
        if h.dimensions() != self.space.dimensions() {
            return Err(VsaError::DimensionMismatch {
                left: self.space.dimensions(),
                right: h.dimensions(),
            });
        }
        Ok(())
    }

    /// Applies the update rule to every sample, in order, `epochs` times.
    pub fn train<'a, I>(&mut self, samples: I, epochs: usize) -> Result<(), LearnError>
    where
        I: IntoIterator<Item = (&'a Hypervector, i64)>,
        I::IntoIter: Clone,
    {
        if epochs == 0 {
            return Err(LearnError::InvalidEpochs);
        }
        let samples = samples.into_iter();
        for _ in 0..epochs {
            for (h, y) in samples.clone() {
                self.update(h, y)?;
            }
        }
        Ok(())
    }

    /// One training step under the memory's strategy.
    pub fn update(&mut self, h: &Hypervector, y: i64) -> Result<(), LearnError> {
        match self.strategy {
            Strategy::Add => self.update_add(h, y),
            Strategy::AdaptHd => self.update_adapthd(h, y),
            Strategy::OnlineHd => self.update_onlinehd(h, y),
            Strategy::RefineHd => self.update_refinehd(h, y),
        }
    }

    fn accumulator(&mut self, y: i64) -> &mut Hypervector {
        self.classes.get_mut(&y).expect("class admitted before update")
    }

    /// Admits `y` and reports whether its accumulator is still zero, in which
    /// case the sample has been added unconditionally.
    fn cold_start(&mut self, h: &Hypervector, y: i64) -> Result<bool, LearnError> {
        self.check_space(h)?;
        self.admit_class(y);
        if self.classes[&y].is_zero() {
            self.accumulator(y).add_scaled(h, 1.0)?;
            return Ok(true);
        }
        Ok(false)
    }

    pub fn update_add(&mut self, h: &Hypervector, y: i64) -> Result<(), LearnError> {
        self.check_space(h)?;
        self.admit_class(y);
        self.accumulator(y).add_scaled(h, 1.0)?;
        Ok(())
    }

    pub fn update_adapthd(&mut self, h: &Hypervector, y: i64) -> Result<(), LearnError> {
        if self.cold_start(h, y)? {
            return Ok(());
        }
        let p = self.predict(h)?;
        if p.label != y {
            self.accumulator(y).add_scaled(h, 1.0)?;
            self.accumulator(p.label).add_scaled(h, -1.0)?;
        }
        Ok(())
    }

    pub fn update_onlinehd(&mut self, h: &Hypervector, y: i64) -> Result<(), LearnError> {
        if self.cold_start(h, y)? {
            return Ok(());
        }
        let p = self.predict(h)?;
        if p.label != y {
            let s_y = score_of(&p, y);
            let s_hat = score_of(&p, p.label);
            self.accumulator(y).add_scaled(h, 1.0 - s_y)?;
            self.accumulator(p.label).add_scaled(h, -(1.0 - s_hat))?;
        }
        Ok(())
    }

    pub fn update_refinehd(&mut self, h: &Hypervector, y: i64) -> Result<(), LearnError> {
        if self.cold_start(h, y)? {
            return Ok(());
        }
        let p = self.predict(h)?;
        let s_y = score_of(&p, y);
        if p.label != y {
            self.mis_stats.record(s_y);
            let s_hat = score_of(&p, p.label);
            self.accumulator(y).add_scaled(h, 1.0 - s_y)?;
            self.accumulator(p.label).add_scaled(h, -(1.0 - s_hat))?;
        } else if self.mis_stats.count > 0 && s_y < self.threshold * self.mis_stats.mean() {
            self.accumulator(y).add_scaled(h, 1.0 - s_y)?;
        }
        Ok(())
    }

    /// Most similar class, ties to the smallest label.
    pub fn predict(&self, h: &Hypervector) -> Result<Prediction, LearnError> {
        self.check_space(h)?;
        if self.classes.values().all(Hypervector::is_zero) {
            return Err(LearnError::Untrained);
        }
        let scores = self
            .classes
            .iter()
            .map(|(&label, c)| Ok((label, delta(h, c)?)))
            .collect::<Result<Vec<_>, VsaError>>()?;
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if s.1 > scores[best].1 {
                best = i;
            }
        }
        let runner_up = scores
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best)
            .map(|(_, s)| s.1)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Prediction {
            label: scores[best].0,
            margin: scores[best].1 - runner_up,
            scores,
        })
    }

    /// `similarity(H, C_positive) - similarity(H, C_negative)`.
    pub fn score_binary(&self, h: &Hypervector, positive: i64, negative: i64) -> Result<f64, LearnError> {
        self.check_space(h)?;
        let pos = self.classes.get(&positive).ok_or(LearnError::UnknownClass(positive))?;
        let neg = self.classes.get(&negative).ok_or(LearnError::UnknownClass(negative))?;
        Ok(delta(h, pos)? - delta(h, neg)?)
    }

    pub(crate) fn from_parts(
        space: Space,
        strategy: Strategy,
        threshold: f64,
        classes: BTreeMap<i64, Hypervector>,
        mis_stats: MisStats,
    ) -> Self {
        Self {
            space,
            strategy,
            threshold,
            classes,
            mis_stats,
        }
    }
}

fn score_of(p: &Prediction, label: i64) -> f64 {
    p.scores
        .iter()
        .find(|(l, _)| *l == label)
        .map(|s| s.1)
        .expect("prediction covers every class")
}
