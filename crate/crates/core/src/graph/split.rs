use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, GraphError};

/// Disjoint train/test index lists over a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Stratified split: each class is shuffled with a ChaCha8 stream seeded by
/// `seed`, and its first `ceil(train_fraction * n_class)` members go to train.
/// Both sides are then shuffled with the same stream so that training order
/// interleaves the classes.
pub fn stratified_split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Split, GraphError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(GraphError::Split(format!(
            "train fraction {train_fraction} is not in (0, 1)"
        )));
    }
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in dataset.graphs().iter().enumerate() {
        by_class.entry(g.label()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut members) in by_class {
        members.shuffle(&mut rng);
        let n = members.len();
        if n == 1 {
            log::warn!("class {class} has a single member; it is assigned to the training side");
        }
        // The epsilon keeps exact products such as 0.8 * 5 from rounding up.
        let k = ((train_fraction * n as f64) - 1e-9).ceil().max(1.0) as usize;
        let k = k.min(n);
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok(Split {
        train_indices: train,
        test_indices: test,
        seed,
        train_fraction,
    })
}
