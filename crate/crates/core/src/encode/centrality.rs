use crate::graph::Graph;

/// Outcome of a PageRank power iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

/// PageRank of an undirected graph by power iteration with uniform teleport.
///
/// Each node spreads its score evenly over its neighbors; isolated nodes
/// spread theirs uniformly over all nodes. Iteration stops once the L1 change
/// drops below `tol`. If `max_iter` is reached first the last iterate is
/// returned with `converged == false`.
pub fn pagerank(graph: &Graph, damping: f64, tol: f64, max_iter: usize) -> PageRank {
    let n = graph.num_nodes();
    if n == 0 {
        return PageRank {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let uniform = 1.0 / n as f64;
    let mut rank = vec![uniform; n];
    let mut next = vec![0.0; n];
    for it in 1..=max_iter {
        let dangling: f64 = (0..n).filter(|&v| graph.degree(v) == 0).map(|v| rank[v]).sum();
        let base = (1.0 - damping) * uniform + damping * dangling * uniform;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = graph
                .neighbors(v)
                .iter()
                .map(|&u| rank[u] / graph.degree(u) as f64)
                .sum();
            *slot = base + damping * inflow;
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < tol {
            return PageRank {
                scores: rank,
                iterations: it,
                converged: true,
            };
        }
    }
    log::warn!("PageRank did not converge in {max_iter} iterations");
    PageRank {
        scores: rank,
        iterations: max_iter,
        converged: false,
    }
}

/// Degree centrality `deg(v) / (n - 1)` (0 for a single node).
pub fn degree_centrality(graph: &Graph) -> Vec<f64> {
    let n = graph.num_nodes();
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    (0..n).map(|v| graph.degree(v) as f64 / denom).collect()
}

/// Node indices ordered by descending score, ties by ascending index.
/// Returns `rank[v]`.
pub fn ranks(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut rank = vec![0; scores.len()];
    for (r, v) in order.into_iter().enumerate() {
        rank[v] = r;
    }
    rank
}
