//! TUDataset plain-text format.
//!
//! A dataset `NAME` is a directory of comma-separated text files with
//! 1-based global node ids:
//!
//! - `NAME_A.txt`: one directed edge `u, v` per line.
//! - `NAME_graph_indicator.txt`: line `i` holds the graph id of node `i`.
//! - `NAME_graph_labels.txt`: one class label per graph.
//! - `NAME_node_labels.txt` (optional): one integer label per node.
//! - `NAME_edge_labels.txt` (optional): one integer per line of `NAME_A.txt`;
//!   validated, then discarded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Dataset, Graph, GraphError};

/// Everything read from a TUDataset directory, before dataset-level
/// validation. Graphs without nodes are kept so callers can report them.
#[derive(Clone, Debug)]
pub struct RawDataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub has_graph_labels: bool,
    pub self_loops: usize,
}

impl RawDataset {
    pub fn into_dataset(self) -> Result<Dataset, GraphError> {
        if !self.has_graph_labels {
            return Err(GraphError::MissingFile(PathBuf::from(format!(
                "{}_graph_labels.txt",
                self.name
            ))));
        }
        Dataset::new(self.name, self.graphs)
    }
}

fn file(root: &Path, name: &str, suffix: &str) -> PathBuf {
    root.join(format!("{name}_{suffix}.txt"))
}

fn read_required(path: &Path) -> Result<String, GraphError> {
    if !path.is_file() {
        return Err(GraphError::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

fn read_optional(path: &Path) -> Result<Option<String>, GraphError> {
    if path.is_file() {
        Ok(Some(fs::read_to_string(path)?))
    } else {
        Ok(None)
    }
}

/// Non-blank lines with their 1-based line numbers. Blank lines are only
/// tolerated at the end of the file.
fn lines<'a>(path: &'a Path, text: &'a str) -> Result<Vec<(usize, &'a str)>, GraphError> {
    let all: Vec<&str> = text.lines().map(|l| l.trim()).collect();
    let last = all.iter().rposition(|l| !l.is_empty()).map_or(0, |i| i + 1);
    all[..last]
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if l.is_empty() {
                Err(parse_err(path, i + 1, "unexpected blank line"))
            } else {
                Ok((i + 1, *l))
            }
        })
        .collect()
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        file: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn int(path: &Path, line: usize, token: &str) -> Result<i64, GraphError> {
    token
        .trim()
        .parse::<i64>()
        .map_err(|_| parse_err(path, line, format!("expected an integer, found '{}'", token.trim())))
}

fn single_ints(path: &Path, text: &str) -> Result<Vec<i64>, GraphError> {
    lines(path, text)?
        .into_iter()
        .map(|(n, l)| int(path, n, l))
        .collect()
}

/// Finds `NAME` from the `NAME_graph_indicator.txt` file in `dir`.
pub fn discover_name(dir: &Path) -> Result<String, GraphError> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir)? {
        let fname = entry?.file_name().to_string_lossy().into_owned();
        if let Some(name) = fname.strip_suffix("_graph_indicator.txt") {
            found.push(name.to_owned());
        }
    }
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        0 => Err(GraphError::MissingFile(dir.join("<NAME>_graph_indicator.txt"))),
        _ => Err(GraphError::Invalid(format!(
            "{} contains several datasets: {}",
            dir.display(),
            found.join(", ")
        ))),
    }
}

/// Reads the files of dataset `name` in `root` without rejecting empty graphs
/// or a missing graph-label file.
pub fn read_tudataset(root: &Path, name: &str) -> Result<RawDataset, GraphError> {
    let a_path = file(root, name, "A");
    let ind_path = file(root, name, "graph_indicator");
    let gl_path = file(root, name, "graph_labels");
    let nl_path = file(root, name, "node_labels");
    let el_path = file(root, name, "edge_labels");

    let indicator_text = read_required(&ind_path)?;
    let a_text = read_required(&a_path)?;

    let mut graph_of = Vec::new();
    for (n, l) in lines(&ind_path, &indicator_text)? {
        let g = int(&ind_path, n, l)?;
        if g < 1 {
            return Err(parse_err(&ind_path, n, format!("graph id {g} is not 1-based")));
        }
        graph_of.push(g as usize - 1);
    }

    let graph_labels = match read_optional(&gl_path)? {
        Some(text) => Some(single_ints(&gl_path, &text)?),
        None => None,
    };
    let max_graph = graph_of.iter().max().map_or(0, |g| g + 1);
    let num_graphs = match &graph_labels {
        Some(labels) => {
            if labels.len() < max_graph {
                return Err(GraphError::Invalid(format!(
                    "{} lists {} labels but the indicator references graph {max_graph}",
                    gl_path.display(),
                    labels.len()
                )));
            }
            labels.len()
        }
        None => max_graph,
    };

    // Per-graph local indices in order of appearance.
    let mut sizes = vec![0usize; num_graphs];
    let mut local = Vec::with_capacity(graph_of.len());
    for &g in &graph_of {
        local.push(sizes[g]);
        sizes[g] += 1;
    }

    let node_labels = match read_optional(&nl_path)? {
        Some(text) => {
            let labels = single_ints(&nl_path, &text)?;
            if labels.len() != graph_of.len() {
                return Err(GraphError::Invalid(format!(
                    "{} has {} lines for {} nodes",
                    nl_path.display(),
                    labels.len(),
                    graph_of.len()
                )));
            }
            Some(labels)
        }
        None => None,
    };

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    let a_lines = lines(&a_path, &a_text)?;
    for &(n, l) in &a_lines {
        let mut parts = l.split(',');
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(&a_path, n, "expected 'u, v'"));
        };
        let (u, v) = (int(&a_path, n, u)?, int(&a_path, n, v)?);
        let node = |x: i64| -> Result<usize, GraphError> {
            if x < 1 || x as usize > graph_of.len() {
                Err(parse_err(&a_path, n, format!("node {x} is not in the indicator file")))
            } else {
                Ok(x as usize - 1)
            }
        };
        let (u, v) = (node(u)?, node(v)?);
        if graph_of[u] != graph_of[v] {
            return Err(parse_err(
                &a_path,
                n,
                format!(
                    "edge joins node {} of graph {} with node {} of graph {}",
                    u + 1,
                    graph_of[u] + 1,
                    v + 1,
                    graph_of[v] + 1
                ),
            ));
        }
        edges[graph_of[u]].push((local[u], local[v]));
    }

    if let Some(text) = read_optional(&el_path)? {
        let count = single_ints(&el_path, &text)?.len();
        if count != a_lines.len() {
            return Err(GraphError::Invalid(format!(
                "{} has {count} lines for {} edges",
                el_path.display(),
                a_lines.len()
            )));
        }
    }

    let mut per_graph_labels: Option<Vec<Vec<i64>>> = node_labels.map(|labels| {
        let mut out: Vec<Vec<i64>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &g) in graph_of.iter().enumerate() {
            out[g].push(labels[i]);
        }
        out
    });

    let mut graphs = Vec::with_capacity(num_graphs);
    let mut self_loops = 0;
    for (g, graph_edges) in edges.into_iter().enumerate() {
        let labels = per_graph_labels.as_mut().map(|l| std::mem::take(&mut l[g]));
        let label = graph_labels.as_ref().map_or(0, |l| l[g]);
        let (graph, loops) = Graph::with_loop_count(sizes[g], graph_edges, labels, label)?;
        self_loops += loops;
        graphs.push(graph);
    }
    if self_loops > 0 {
        log::warn!("{name}: dropped {self_loops} self-loop edges");
    }

    Ok(RawDataset {
        name: name.to_owned(),
        graphs,
        has_graph_labels: graph_labels.is_some(),
        self_loops,
    })
}

/// Parses dataset `name` from `root`.
pub fn parse_tudataset(root: &Path, name: &str) -> Result<Dataset, GraphError> {
    read_tudataset(root, name)?.into_dataset()
}

/// Writes `graphs` in TUDataset layout, each undirected edge in both
/// directions. Node labels are written when every graph carries them.
pub fn write_tudataset(root: &Path, name: &str, graphs: &[Graph]) -> Result<(), GraphError> {
    fs::create_dir_all(root)?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut node_labels = String::new();
    let with_node_labels = graphs.iter().all(|g| g.node_labels().is_some());
    let mut offset = 1;
    for (gi, g) in graphs.iter().enumerate() {
        for v in 0..g.num_nodes() {
            writeln!(indicator, "{}", gi + 1).unwrap();
            if with_node_labels {
                writeln!(node_labels, "{}", g.node_labels().unwrap()[v]).unwrap();
            }
        }
        for &(u, v) in g.edges() {
            writeln!(a, "{}, {}", u + offset, v + offset).unwrap();
            writeln!(a, "{}, {}", v + offset, u + offset).unwrap();
        }
        writeln!(labels, "{}", g.label()).unwrap();
        offset += g.num_nodes();
    }
    fs::write(file(root, name, "A"), a)?;
    fs::write(file(root, name, "graph_indicator"), indicator)?;
    fs::write(file(root, name, "graph_labels"), labels)?;
    if with_node_labels {
        fs::write(file(root, name, "node_labels"), node_labels)?;
    }
    Ok(())
}
