//! Graph and dataset model, TUDataset I/O, fetching and splitting.

mod fetch;
mod split;
mod tudataset;

use std::collections::BTreeSet;
use std::path::PathBuf;

use thiserror::Error;

pub use fetch::{default_cache_dir, fetch_dataset, fetch_dataset_with, HttpTransport, Transport, DEFAULT_BASE_URL};
pub use split::{stratified_split, Split};
pub use tudataset::{discover_name, parse_tudataset, read_tudataset, write_tudataset, RawDataset};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("missing mandatory file {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("fetching dataset '{name}' failed: {message}")]
    Fetch { name: String, message: String },
    #[error("invalid split: {0}")]
    Split(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An undirected simple graph with optional integer node labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    node_labels: Option<Vec<i64>>,
    label: i64,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, normalizing edges to `(min, max)`, dropping self-loops
    /// and duplicate undirected edges. Returns the graph and the number of
    /// self-loops dropped.
    pub fn with_loop_count(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        node_labels: Option<Vec<i64>>,
        label: i64,
    ) -> Result<(Self, usize), GraphError> {
        if let Some(labels) = &node_labels {
            if labels.len() != num_nodes {
                return Err(GraphError::Invalid(format!(
                    "{} node labels for {num_nodes} nodes",
                    labels.len()
                )));
            }
        }
        let mut set = BTreeSet::new();
        let mut loops = 0;
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(GraphError::Invalid(format!(
                    "edge ({u}, {v}) outside a graph of {num_nodes} nodes"
                )));
            }
            if u == v {
                loops += 1;
                continue;
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        adjacency.iter_mut().for_each(|n| n.sort_unstable());
        Ok((
            Self {
                num_nodes,
                edges,
                node_labels,
                label,
                adjacency,
            },
            loops,
        ))
    }

    pub fn new(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        node_labels: Option<Vec<i64>>,
        label: i64,
    ) -> Result<Self, GraphError> {
        Self::with_loop_count(num_nodes, edges, node_labels, label).map(|(g, _)| g)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.num_nodes == 0
    }

    /// Sorted normalized edges, each with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_labels(&self) -> Option<&[i64]> {
        self.node_labels.as_deref()
    }

    pub fn label(&self) -> i64 {
        self.label
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Reindexes the nodes: old node `i` becomes node `perm[i]`.
    pub fn relabel_nodes(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.num_nodes {
            return Err(GraphError::Invalid("permutation length mismatch".into()));
        }
        let labels = self.node_labels.as_ref().map(|l| {
            let mut out = vec![0; l.len()];
            for (i, &p) in perm.iter().enumerate() {
                out[p] = l[i];
            }
            out
        });
        Graph::new(
            self.num_nodes,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
            labels,
            self.label,
        )
    }
}

/// A non-empty labelled collection of non-empty graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    class_values: Vec<i64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>) -> Result<Self, GraphError> {
        let name = name.into();
        if graphs.is_empty() {
            return Err(GraphError::Invalid(format!("dataset '{name}' has no graphs")));
        }
        if let Some(i) = graphs.iter().position(Graph::is_empty) {
            return Err(GraphError::Invalid(format!(
                "graph {} of dataset '{name}' has no nodes",
                i + 1
            )));
        }
        let class_values: Vec<i64> = graphs
            .iter()
            .map(Graph::label)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self {
            name,
            graphs,
            class_values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Sorted distinct graph labels.
    pub fn class_values(&self) -> &[i64] {
        &self.class_values
    }

    pub fn has_node_labels(&self) -> bool {
        self.graphs.iter().all(|g| g.node_labels().is_some())
    }
}
