//! Small synthetic molecule-like datasets for tests and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dataset, Graph};

/// Backbone labels shared by both classes.
const BACKBONE_LABELS: [i64; 3] = [1, 2, 3];

/// Random labelled tree of `n` nodes (labels from the shared backbone set).
pub fn random_tree(rng: &mut impl Rng, n: usize, label: i64) -> Graph {
    let labels = (0..n).map(|_| BACKBONE_LABELS[rng.gen_range(0..3)]).collect();
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::new(n, edges, Some(labels), label).expect("tree is valid")
}

/// Two-class dataset: every graph is a random backbone tree with one
/// class-specific star motif attached. Class 0 graphs carry a hub labelled
/// 10 with three leaves labelled 11, class 1 graphs a hub labelled 20 with
/// leaves labelled 21. Classes alternate, so `n_graphs / 2` of each.
pub fn motif_dataset(name: &str, n_graphs: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs = (0..n_graphs)
        .map(|i| {
            let class = (i % 2) as i64;
            let n = rng.gen_range(4..=10);
            let tree = random_tree(&mut rng, n, class);
            let (hub, leaf) = if class == 0 { (10, 11) } else { (20, 21) };
            let mut labels = tree.node_labels().unwrap().to_vec();
            let mut edges = tree.edges().to_vec();
            let anchor = rng.gen_range(0..n);
            labels.push(hub);
            edges.push((anchor, n));
            for k in 0..3 {
                labels.push(leaf);
                edges.push((n, n + 1 + k));
            }
            Graph::new(n + 4, edges, Some(labels), class).expect("motif graph is valid")
        })
        .collect();
    Dataset::new(name, graphs).expect("non-empty dataset")
}
