//! Immutable graphs over dense node indices, plus ground-truth community labels.
//!
//! Adjacency is stored in compressed sparse row form: `offsets[u]..offsets[u + 1]`
//! indexes into `targets`, and each row is sorted ascending without duplicates.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty graph")]
    EmptyGraph,
    #[error("unknown node id '{0}'")]
    UnknownNode(String),
    #[error("node '{node}' labeled twice with different labels ('{first}' and '{second}')")]
    ConflictingLabel {
        node: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Graph {
    /// Builds a graph from named nodes and index pairs.
    ///
    /// Self-loops are dropped and parallel edges collapsed. For undirected graphs every
    /// edge is stored in both adjacency lists.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)], directed: bool) -> Self {
        let n = names.len();
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                continue;
            }
            lists[u].push(v);
            if !directed {
                lists[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i))
            .collect();
        Graph {
            directed,
            offsets,
            targets,
            names,
            index,
        }
    }

    /// Same as [`Graph::from_edges`] with node names `"0".."n-1"`.
    pub fn from_index_edges(node_count: usize, edges: &[(usize, usize)], directed: bool) -> Self {
        let names = (0..node_count).map(|i| i.to_string()).collect();
        Self::from_edges(names, edges, directed)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of distinct edges; undirected edges count once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    /// Out-neighbors of `u`, sorted ascending.
    ///
    /// Panics if `u` is out of range.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        assert!(
            u < self.node_count(),
            "node index {u} out of range (node_count = {})",
            self.node_count()
        );
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).len()
    }

    /// Start of `u`'s row in the flat adjacency array. Lets callers keep per-edge data aligned
    /// with the adjacency lists.
    pub(crate) fn row_offset(&self, u: usize) -> usize {
        self.offsets[u]
    }

    pub(crate) fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as stored: every arc for directed graphs, `u < v` pairs for undirected ones.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| self.directed || u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Undirected copy of this graph (every arc mirrored). Node indices are unchanged.
    pub fn symmetrized(&self) -> Graph {
        let edges: Vec<_> = self.edges().collect();
        Graph::from_edges(self.names.clone(), &edges, false)
    }

    /// Graph over the same nodes (and directedness) with a different edge set.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(self.names.clone(), edges, self.directed)
    }

    /// Writes the edge list using external node names. Nodes without any incident edge are
    /// written as self-loop lines so that reloading recovers them.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut touched = vec![false; self.node_count()];
        for (u, v) in self.edges() {
            touched[u] = true;
            touched[v] = true;
        }
        for u in 0..self.node_count() {
            if !touched[u] {
                writeln!(out, "{} {}", self.names[u], self.names[u])?;
            }
        }
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.names[u], self.names[v])?;
        }
        Ok(())
    }
}

/// Parses an edge list: two whitespace-separated tokens per line, `#` starts a comment line.
/// Node indices are assigned in first-appearance order.
pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<Graph, GraphError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(name) {
            return i;
        }
        let i = names.len();
        names.push(name.to_owned());
        index.insert(name.to_owned(), i);
        i
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let u = intern(tokens[0], &mut names);
        let v = intern(tokens[1], &mut names);
        edges.push((u, v));
    }
    if names.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    Ok(Graph::from_edges(names, &edges, directed))
}

pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph, GraphError> {
    let file = File::open(path)?;
    parse_edge_list(BufReader::new(file), directed)
}

/// Ground-truth communities with dense ids `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<Option<usize>>,
    label_names: Vec<String>,
}

impl LabelMap {
    /// Builds a label map from per-node community ids. Ids are re-indexed densely in
    /// first-appearance order.
    pub fn from_assignments(labels: &[Option<usize>]) -> Self {
        let mut dense: HashMap<usize, usize> = HashMap::new();
        let mut label_names = Vec::new();
        let labels = labels
            .iter()
            .map(|l| {
                l.map(|raw| {
                    *dense.entry(raw).or_insert_with(|| {
                        label_names.push(raw.to_string());
                        label_names.len() - 1
                    })
                })
            })
            .collect();
        LabelMap {
            labels,
            label_names,
        }
    }

    /// Number of distinct communities.
    pub fn k(&self) -> usize {
        self.label_names.len()
    }

    pub fn label(&self, u: usize) -> Option<usize> {
        self.labels[u]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label_name(&self, id: usize) -> &str {
        &self.label_names[id]
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }
}

pub fn parse_labels<R: BufRead>(reader: R, graph: &Graph) -> Result<LabelMap, GraphError> {
    let mut labels: Vec<Option<usize>> = vec![None; graph.node_count()];
    let mut label_names: Vec<String> = Vec::new();
    let mut dense: HashMap<String, usize> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let node = graph
            .index_of(tokens[0])
            .ok_or_else(|| GraphError::UnknownNode(tokens[0].to_owned()))?;
        let id = *dense.entry(tokens[1].to_owned()).or_insert_with(|| {
            label_names.push(tokens[1].to_owned());
            label_names.len() - 1
        });
        match labels[node] {
            Some(existing) if existing != id => {
                return Err(GraphError::ConflictingLabel {
                    node: tokens[0].to_owned(),
                    first: label_names[existing].clone(),
                    second: tokens[1].to_owned(),
                })
            }
            _ => labels[node] = Some(id),
        }
    }
    if label_names.is_empty() {
        return Err(GraphError::Parse {
            line: 0,
            message: "label file holds no labels".into(),
        });
    }
    Ok(LabelMap {
        labels,
        label_names,
    })
}

pub fn load_labels(path: impl AsRef<Path>, graph: &Graph) -> Result<LabelMap, GraphError> {
    let file = File::open(path)?;
    parse_labels(BufReader::new(file), graph)
}
