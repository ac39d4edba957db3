//! Embedding storage: the published input matrix plus the trainer's context matrix.

use std::fs::File;
use std::hash::{DefaultHasher, Hasher};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

/// Denominators below this make every neighbor distance collapse to zero.
pub const ZERO_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("empty graph")]
    EmptyGraph,
}

/// Row-major `rows × dim` matrices. `input` holds the embedding, `context` the output
/// vectors used only during training.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    input: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Uniform `[-0.5/d, 0.5/d)` input entries and an all-zero context matrix.
    pub fn init(node_count: usize, dim: usize, seed: u64) -> Self {
        assert!(node_count >= 1, "node_count must be at least 1");
        assert!(dim >= 1, "dim must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / dim as f64;
        let input = (0..node_count * dim)
            .map(|_| (rng.random::<f64>() - 0.5) * scale)
            .collect();
        EmbeddingMatrix {
            rows: node_count,
            dim,
            input,
            context: vec![0.0; node_count * dim],
        }
    }

    /// Wraps an existing row-major input matrix; the context matrix starts at zero.
    pub fn from_rows(rows: usize, dim: usize, input: Vec<f64>) -> Self {
        assert!(dim >= 1, "dim must be at least 1");
        assert_eq!(input.len(), rows * dim, "input length must be rows * dim");
        EmbeddingMatrix {
            rows,
            dim,
            input,
            context: vec![0.0; rows * dim],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.input[u * self.dim..(u + 1) * self.dim]
    }

    pub fn row_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.input[u * self.dim..(u + 1) * self.dim]
    }

    pub fn context_row(&self, u: usize) -> &[f64] {
        &self.context[u * self.dim..(u + 1) * self.dim]
    }

    pub fn context_row_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.context[u * self.dim..(u + 1) * self.dim]
    }

    pub fn input(&self) -> &[f64] {
        &self.input
    }

    pub fn context(&self) -> &[f64] {
        &self.context
    }

    /// Simultaneous mutable access to both matrices.
    pub(crate) fn split_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.input, &mut self.context)
    }

    pub fn is_finite(&self) -> bool {
        self.input
            .iter()
            .chain(&self.context)
            .all(|x| x.is_finite())
    }

    /// Hash of the bit patterns of the input matrix.
    pub fn checksum(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        hasher.write_usize(self.rows);
        hasher.write_usize(self.dim);
        for x in &self.input {
            hasher.write_u64(x.to_bits());
        }
        hasher.finish()
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        euclidean(self.row(u), self.row(v))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Normalized distance from `u` to each of its neighbors, in `neighbors(u)` order.
///
/// Each distance is divided by the largest one; if that maximum is below
/// [`ZERO_DENOMINATOR`] every value is 0.
pub fn neighbor_distances(graph: &Graph, emb: &EmbeddingMatrix, u: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(graph.degree(u));
    neighbor_distances_into(graph, emb, u, &mut out);
    out
}

pub(crate) fn neighbor_distances_into(
    graph: &Graph,
    emb: &EmbeddingMatrix,
    u: usize,
    out: &mut Vec<f64>,
) {
    out.clear();
    let origin = emb.row(u);
    out.extend(
        graph
            .neighbors(u)
            .iter()
            .map(|&v| euclidean(origin, emb.row(v))),
    );
    let max = out.iter().copied().fold(0.0_f64, f64::max);
    if max < ZERO_DENOMINATOR {
        out.iter_mut().for_each(|x| *x = 0.0);
    } else {
        out.iter_mut().for_each(|x| *x /= max);
    }
}

/// Normalized distance between `u` and its neighbor `v`. Panics if `v` is not a neighbor.
pub fn normalized_distance(graph: &Graph, emb: &EmbeddingMatrix, u: usize, v: usize) -> f64 {
    let pos = graph
        .neighbors(u)
        .binary_search(&v)
        .unwrap_or_else(|_| panic!("{v} is not a neighbor of {u}"));
    neighbor_distances(graph, emb, u)[pos]
}

/// Header `"rows dim"`, then one line per node: name followed by `dim` values with six
/// fractional digits.
pub fn write_embeddings<W: Write>(
    emb: &EmbeddingMatrix,
    names: &[String],
    out: W,
) -> std::io::Result<()> {
    assert_eq!(names.len(), emb.rows(), "one name per row required");
    let mut out = BufWriter::new(out);
    writeln!(out, "{} {}", emb.rows(), emb.dim())?;
    for (u, name) in names.iter().enumerate() {
        write!(out, "{name}")?;
        for x in emb.row(u) {
            write!(out, " {x:.6}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_embeddings(
    emb: &EmbeddingMatrix,
    names: &[String],
    path: impl AsRef<Path>,
) -> Result<(), EmbedError> {
    write_embeddings(emb, names, File::create(path)?)?;
    Ok(())
}

/// Reads the text format back. Returns the matrix and the node names in row order.
pub fn read_embeddings<R: BufRead>(
    reader: R,
) -> Result<(EmbeddingMatrix, Vec<String>), EmbedError> {
    let format = |line: usize, message: String| EmbedError::Format { line, message };
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| format(1, "missing header".into()))??;
    let mut parts = header.split_whitespace();
    let mut header_field = |what: &str| -> Result<usize, EmbedError> {
        parts
            .next()
            .ok_or_else(|| format(1, format!("header missing {what}")))?
            .parse()
            .map_err(|e| format(1, format!("bad {what} in header: {e}")))
    };
    let rows = header_field("node count")?;
    let dim = header_field("dimension")?;
    if parts.next().is_some() {
        return Err(format(1, "header must hold exactly two fields".into()));
    }
    if rows == 0 {
        return Err(EmbedError::EmptyGraph);
    }
    if dim == 0 {
        return Err(format(1, "dimension must be at least 1".into()));
    }
    let mut names = Vec::with_capacity(rows);
    let mut values = Vec::with_capacity(rows * dim);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if names.len() == rows {
            return Err(format(
                lineno,
                format!("more rows than the header's {rows}"),
            ));
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().expect("non-empty line has a token");
        let before = values.len();
        for tok in tokens {
            let x: f64 = tok
                .parse()
                .map_err(|_| format(lineno, format!("non-numeric value '{tok}'")))?;
            if !x.is_finite() {
                return Err(format(lineno, format!("non-finite value '{tok}'")));
            }
            values.push(x);
        }
        if values.len() - before != dim {
            return Err(format(
                lineno,
                format!("expected {dim} values, found {}", values.len() - before),
            ));
        }
        names.push(name.to_owned());
    }
    if names.len() != rows {
        return Err(format(
            names.len() + 2,
            format!("header declares {rows} rows, body has {}", names.len()),
        ));
    }
    Ok((EmbeddingMatrix::from_rows(rows, dim, values), names))
}

pub fn load_embeddings(
    path: impl AsRef<Path>,
) -> Result<(EmbeddingMatrix, Vec<String>), EmbedError> {
    read_embeddings(BufReader::new(File::open(path)?))
}
