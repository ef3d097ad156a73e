//! Graph -> hypervector encoders.
//!
//! The star encoder binds every node's vector with the vectors of its
//! neighbors and bundles one such term per node, so that a graph becomes a
//! weighted histogram of its radius-1 star subgraphs. Gayler & Levy bundle
//! one bound pair per edge over node-index vectors; GraphHD does the same
//! after re-keying nodes by their centrality rank.

mod centrality;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::vsa::{Backend, Codebook, Hypervector, Token, VsaError};

pub use centrality::{
    degree_centrality, pagerank, ranks, PageRank, DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("cannot encode a graph without nodes")]
    EmptyGraph,
    #[error("node-label keying requires node labels, but the graph has none")]
    MissingNodeLabels,
    #[error("node {node} is out of range for a graph of {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error(transparent)]
    Vsa(#[from] VsaError),
}

/// What the atomic vector of a node is keyed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKeying {
    NodeLabel,
    Degree,
    NodeIdRandom,
}

impl NodeKeying {
    pub fn name(self) -> &'static str {
        match self {
            NodeKeying::NodeLabel => "node-label",
            NodeKeying::Degree => "degree",
            NodeKeying::NodeIdRandom => "node-id-random",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            NodeKeying::NodeLabel => 1,
            NodeKeying::Degree => 2,
            NodeKeying::NodeIdRandom => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(NodeKeying::NodeLabel),
            2 => Some(NodeKeying::Degree),
            3 => Some(NodeKeying::NodeIdRandom),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKeying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeKeying {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "node-label" | "label" => Ok(NodeKeying::NodeLabel),
            "degree" => Ok(NodeKeying::Degree),
            "node-id-random" | "node-id" => Ok(NodeKeying::NodeIdRandom),
            other => Err(format!(
                "unknown keying '{other}' (expected node-label, degree or node-id-random)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centrality {
    PageRank,
    Degree,
}

impl Centrality {
    pub fn name(self) -> &'static str {
        match self {
            Centrality::PageRank => "pagerank",
            Centrality::Degree => "degree",
        }
    }
}

/// Encoder family; GraphHD carries its centrality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderKind {
    Star,
    GaylerLevy,
    GraphHd(Centrality),
}

impl EncoderKind {
    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Star => "star",
            EncoderKind::GaylerLevy => "gayler-levy",
            EncoderKind::GraphHd(Centrality::PageRank) => "graphhd-pagerank",
            EncoderKind::GraphHd(Centrality::Degree) => "graphhd-degree",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            EncoderKind::Star => 1,
            EncoderKind::GaylerLevy => 2,
            EncoderKind::GraphHd(Centrality::PageRank) => 3,
            EncoderKind::GraphHd(Centrality::Degree) => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(EncoderKind::Star),
            2 => Some(EncoderKind::GaylerLevy),
            3 => Some(EncoderKind::GraphHd(Centrality::PageRank)),
            4 => Some(EncoderKind::GraphHd(Centrality::Degree)),
            _ => None,
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "star" => Ok(EncoderKind::Star),
            "gayler-levy" | "gl" => Ok(EncoderKind::GaylerLevy),
            "graphhd" | "graphhd-pagerank" => Ok(EncoderKind::GraphHd(Centrality::PageRank)),
            "graphhd-degree" => Ok(EncoderKind::GraphHd(Centrality::Degree)),
            other => Err(format!(
                "unknown encoder '{other}' (expected star, gayler-levy, graphhd-pagerank or graphhd-degree)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub kind: EncoderKind,
    /// Only consulted by the star encoder; the baselines key on node identity
    /// or centrality rank.
    pub keying: NodeKeying,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            kind: EncoderKind::Star,
            keying: NodeKeying::NodeLabel,
        }
    }
}

impl EncoderConfig {
    /// The keying that actually determines node vectors.
    pub fn effective_keying(&self) -> NodeKeying {
        match self.kind {
            EncoderKind::Star => self.keying,
            _ => NodeKeying::NodeIdRandom,
        }
    }

    pub fn encode(&self, codebook: &Codebook, graph: &Graph) -> Result<Hypervector, EncodeError> {
        match self.kind {
            EncoderKind::Star => encode_star(codebook, self.keying, graph),
            EncoderKind::GaylerLevy => encode_gayler_levy(codebook, graph),
            EncoderKind::GraphHd(c) => encode_graphhd(codebook, graph, c),
        }
    }
}

fn key_token(keying: NodeKeying, graph: &Graph, v: usize) -> Result<Token, EncodeError> {
    if v >= graph.num_nodes() {
        return Err(EncodeError::NodeOutOfRange {
            node: v,
            num_nodes: graph.num_nodes(),
        });
    }
    Ok(Token::Str(match keying {
        NodeKeying::NodeLabel => {
            let labels = graph.node_labels().ok_or(EncodeError::MissingNodeLabels)?;
            format!("L:{}", labels[v])
        }
        NodeKeying::Degree => format!("D:{}", graph.degree(v)),
        NodeKeying::NodeIdRandom => format!("N:{v}"),
    }))
}

/// Atomic vector of node `v`.
pub fn phi(codebook: &Codebook, keying: NodeKeying, graph: &Graph, v: usize) -> Result<Arc<Hypervector>, EncodeError> {
    Ok(codebook.get(key_token(keying, graph, v)?))
}

/// Star-subgraph histogram encoding.
///
/// `H_g = sum_v phi(v) * prod_{u in N(v)} phi(u)`. For MAP and FHRR, whose
/// binding commutes, identical stars are grouped by their (center token,
/// sorted neighbor tokens) key and summed in key order, which makes the
/// output bitwise invariant to node reindexing. For VTB the neighbors are
/// bound in ascending node-index order and terms are summed in node order.
pub fn encode_star(codebook: &Codebook, keying: NodeKeying, graph: &Graph) -> Result<Hypervector, EncodeError> {
    if graph.is_empty() {
        return Err(EncodeError::EmptyGraph);
    }
    let space = codebook.space();
    let mut acc = Hypervector::zero(space);
    if space.backend() == Backend::Vtb {
        for v in 0..graph.num_nodes() {
            let mut h = (*phi(codebook, keying, graph, v)?).clone();
            for &u in graph.neighbors(v) {
                h.bind_assign(&*phi(codebook, keying, graph, u)?)?;
            }
            acc.add_scaled(&h, 1.0)?;
        }
        return Ok(acc);
    }

    let mut stars: BTreeMap<(Token, Vec<Token>), usize> = BTreeMap::new();
    for v in 0..graph.num_nodes() {
        let center = key_token(keying, graph, v)?;
        let mut around = graph
            .neighbors(v)
            .iter()
            .map(|&u| key_token(keying, graph, u))
            .collect::<Result<Vec<_>, _>>()?;
        around.sort_unstable();
        *stars.entry((center, around)).or_default() += 1;
    }
    for ((center, around), count) in stars {
        let mut h = (*codebook.get(center)).clone();
        for t in around {
            h.bind_assign(&codebook.get(t))?;
        }
        acc.add_scaled(&h, count as f64)?;
    }
    Ok(acc)
}

fn encode_edges(codebook: &Codebook, graph: &Graph, token: impl Fn(usize) -> Token) -> Result<Hypervector, EncodeError> {
    if graph.is_empty() {
        return Err(EncodeError::EmptyGraph);
    }
    let mut acc = Hypervector::zero(codebook.space());
    if graph.edges().is_empty() {
        for v in 0..graph.num_nodes() {
            acc.add_scaled(&codebook.get(token(v)), 1.0)?;
        }
        return Ok(acc);
    }
    for &(u, v) in graph.edges() {
        let pair = codebook.get(token(u)).bind(&codebook.get(token(v)))?;
        acc.add_scaled(&pair, 1.0)?;
    }
    Ok(acc)
}

/// Edge-bundle encoding over node-index vectors. An edgeless graph encodes
/// as the bundle of its node vectors.
pub fn encode_gayler_levy(codebook: &Codebook, graph: &Graph) -> Result<Hypervector, EncodeError> {
    encode_edges(codebook, graph, |v| Token::Str(format!("N:{v}")))
}

/// Edge-bundle encoding over centrality-rank vectors (rank 0 = most central,
/// ties by ascending node index).
pub fn encode_graphhd(codebook: &Codebook, graph: &Graph, centrality: Centrality) -> Result<Hypervector, EncodeError> {
    if graph.is_empty() {
        return Err(EncodeError::EmptyGraph);
    }
    let rank = node_ranks(graph, centrality);
    encode_edges(codebook, graph, |v| Token::Str(format!("R:{}", rank[v])))
}

/// Rank of every node under `centrality`.
pub fn node_ranks(graph: &Graph, centrality: Centrality) -> Vec<usize> {
    let scores = match centrality {
        Centrality::PageRank => pagerank(graph, DEFAULT_DAMPING, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).scores,
        Centrality::Degree => degree_centrality(graph),
    };
    ranks(&scores)
}
