//! Random walk generation: uniform (DeepWalk), second-order node2vec, and the annealed
//! semantically biased walker.
//!
//! Every walker samples from an explicit per-step probability vector over `neighbors(u)`,
//! and the same vectors are exposed for testing. Walks stop early at dead ends.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::embed::{neighbor_distances_into, EmbeddingMatrix};
use crate::graph::Graph;
use crate::rng::derive_seed;

/// Below this distance the inverse likelihood saturates.
pub const INV_EPSILON: f64 = 0.01;
/// Threshold (and reciprocal weight) of the step likelihood.
pub const THR_EPSILON: f64 = 0.5;
/// Shift of the exponential likelihood, `c - exp(xi)`.
pub const EXP_SHIFT: f64 = 2.0;
/// Floor applied to the exponential likelihood, which turns negative past `ln 2`.
pub const WEIGHT_FLOOR: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("dead end: node {0} has no out-neighbors")]
    DeadEnd(usize),
    #[error("policy needs an embedding snapshot")]
    MissingEmbeddings,
    #[error("embedding has {rows} rows but the graph has {nodes} nodes")]
    ShapeMismatch { rows: usize, nodes: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LikelihoodKind {
    /// Inverse distance, saturating at `1 / INV_EPSILON`.
    Inv,
    /// Two-level step at `THR_EPSILON`.
    Thr,
    /// Shifted exponential `EXP_SHIFT - exp(xi)`, floored at `WEIGHT_FLOOR`.
    Exp,
}

impl LikelihoodKind {
    pub const ALL: [LikelihoodKind; 3] = [
        LikelihoodKind::Inv,
        LikelihoodKind::Thr,
        LikelihoodKind::Exp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LikelihoodKind::Inv => "inv",
            LikelihoodKind::Thr => "thr",
            LikelihoodKind::Exp => "exp",
        }
    }
}

impl fmt::Display for LikelihoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LikelihoodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inv" => Ok(LikelihoodKind::Inv),
            "thr" => Ok(LikelihoodKind::Thr),
            "exp" => Ok(LikelihoodKind::Exp),
            other => Err(format!(
                "unknown likelihood '{other}' (expected inv, thr or exp)"
            )),
        }
    }
}

/// Unnormalized transition weight for a neighbor at normalized distance `xi`.
///
/// Panics if `xi` is outside `[0, 1]`.
pub fn likelihood_weight(kind: LikelihoodKind, xi: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&xi),
        "normalized distance {xi} outside [0, 1]"
    );
    match kind {
        LikelihoodKind::Inv => {
            if xi > INV_EPSILON {
                1.0 / xi
            } else {
                1.0 / INV_EPSILON
            }
        }
        LikelihoodKind::Thr => {
            if xi > THR_EPSILON {
                THR_EPSILON
            } else {
                1.0 / THR_EPSILON
            }
        }
        LikelihoodKind::Exp => (EXP_SHIFT - xi.exp()).max(WEIGHT_FLOOR),
    }
}

/// How fast the walk moves from uniform to biased transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub beta: f64,
    pub lambda_max: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            beta: 0.2,
            lambda_max: 1.0,
        }
    }
}

impl AnnealSchedule {
    pub fn new(beta: f64) -> Self {
        AnnealSchedule {
            beta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(WalkError::InvalidParameter(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.lambda_max > 0.0 && self.lambda_max <= 1.0) {
            return Err(WalkError::InvalidParameter(format!(
                "lambda_max must lie in (0, 1], got {}",
                self.lambda_max
            )));
        }
        Ok(())
    }

    /// Weight of the biased distribution at epoch `t`: `min(t * beta, lambda_max)`.
    pub fn mixing_weight(&self, epoch: usize) -> f64 {
        (epoch as f64 * self.beta).min(self.lambda_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node2vecParams {
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
}

impl Node2vecParams {
    pub fn validate(&self) -> Result<(), WalkError> {
        if self.p > 0.0 && self.q > 0.0 && self.p.is_finite() && self.q.is_finite() {
            Ok(())
        } else {
            Err(WalkError::InvalidParameter(format!(
                "p and q must be positive, got p={} q={}",
                self.p, self.q
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalWalkParams {
    pub kind: LikelihoodKind,
    pub schedule: AnnealSchedule,
    /// Epoch index `t`, starting at 0.
    pub epoch: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkPolicy {
    Uniform,
    Node2vec(Node2vecParams),
    GlobalWalk(GlobalWalkParams),
}

fn check_not_dead_end(graph: &Graph, u: usize) -> Result<&[usize], WalkError> {
    let nbrs = graph.neighbors(u);
    if nbrs.is_empty() {
        Err(WalkError::DeadEnd(u))
    } else {
        Ok(nbrs)
    }
}

fn normalize(mut weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// `1 / |N(u)|` for every neighbor.
pub fn uniform_distribution(graph: &Graph, u: usize) -> Result<Vec<f64>, WalkError> {
    let deg = check_not_dead_end(graph, u)?.len();
    Ok(vec![1.0 / deg as f64; deg])
}

/// Likelihood weights of all neighbors, normalized to sum to one.
pub fn bias_distribution(
    graph: &Graph,
    emb: &EmbeddingMatrix,
    u: usize,
    kind: LikelihoodKind,
) -> Result<Vec<f64>, WalkError> {
    check_not_dead_end(graph, u)?;
    let mut xi = Vec::new();
    neighbor_distances_into(graph, emb, u, &mut xi);
    Ok(normalize(
        xi.into_iter().map(|x| likelihood_weight(kind, x)).collect(),
    ))
}

/// `(1 - lambda) * uniform + lambda * bias` with `lambda = schedule.mixing_weight(epoch)`.
pub fn annealed_distribution(
    graph: &Graph,
    emb: &EmbeddingMatrix,
    u: usize,
    epoch: usize,
    schedule: &AnnealSchedule,
    kind: LikelihoodKind,
) -> Result<Vec<f64>, WalkError> {
    let deg = check_not_dead_end(graph, u)?.len();
    let lambda = schedule.mixing_weight(epoch);
    let uniform = 1.0 / deg as f64;
    if lambda == 0.0 {
        return Ok(vec![uniform; deg]);
    }
    let bias = bias_distribution(graph, emb, u, kind)?;
    Ok(bias
        .into_iter()
        .map(|b| (1.0 - lambda) * uniform + lambda * b)
        .collect())
}

/// Second-order transition distribution at `current`, having arrived from `previous`.
///
/// With no previous node (the first step) this is uniform.
pub fn node2vec_distribution(
    graph: &Graph,
    previous: Option<usize>,
    current: usize,
    params: &Node2vecParams,
) -> Result<Vec<f64>, WalkError> {
    let nbrs = check_not_dead_end(graph, current)?;
    let Some(prev) = previous else {
        return uniform_distribution(graph, current);
    };
    Ok(normalize(
        nbrs.iter()
            .map(|&x| node2vec_weight(graph, prev, x, params))
            .collect(),
    ))
}

fn node2vec_weight(graph: &Graph, prev: usize, x: usize, params: &Node2vecParams) -> f64 {
    if x == prev {
        1.0 / params.p
    } else if graph.has_edge(prev, x) {
        1.0
    } else {
        1.0 / params.q
    }
}

/// Inverse-CDF draw from a cumulative weight vector.
fn sample_cumulative<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("non-empty cumulative weights");
    let r = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= r)
        .min(cumulative.len() - 1)
}

fn cumulate(values: impl IntoIterator<Item = f64>, out: &mut Vec<f64>) {
    out.clear();
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
}

pub type Walk = Vec<usize>;

/// DeepWalk-style walk of at most `length` nodes.
pub fn uniform_walk<R: Rng + ?Sized>(
    graph: &Graph,
    start: usize,
    length: usize,
    rng: &mut R,
) -> Walk {
    assert!(length >= 1, "walk length must be at least 1");
    let mut walk = Vec::with_capacity(length);
    walk.push(start);
    let mut cur = start;
    while walk.len() < length {
        let nbrs = graph.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        cur = nbrs[rng.random_range(0..nbrs.len())];
        walk.push(cur);
    }
    walk
}

pub fn node2vec_walk<R: Rng + ?Sized>(
    graph: &Graph,
    start: usize,
    length: usize,
    params: &Node2vecParams,
    rng: &mut R,
) -> Walk {
    assert!(length >= 1, "walk length must be at least 1");
    let mut walk = Vec::with_capacity(length);
    let mut cumulative = Vec::new();
    walk.push(start);
    let mut prev: Option<usize> = None;
    let mut cur = start;
    while walk.len() < length {
        let nbrs = graph.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        let next = match prev {
            None => nbrs[rng.random_range(0..nbrs.len())],
            Some(t) => {
                cumulate(
                    nbrs.iter().map(|&x| node2vec_weight(graph, t, x, params)),
                    &mut cumulative,
                );
                nbrs[sample_cumulative(&cumulative, rng)]
            }
        };
        prev = Some(cur);
        cur = next;
        walk.push(cur);
    }
    walk
}

/// Annealed semantically biased walk against a frozen embedding snapshot.
///
/// First-order: each step depends only on the current node. When the mixing weight is 0
/// the walk consumes randomness exactly like [`uniform_walk`].
pub fn global_walk<R: Rng + ?Sized>(
    graph: &Graph,
    snapshot: &EmbeddingMatrix,
    start: usize,
    length: usize,
    params: &GlobalWalkParams,
    rng: &mut R,
) -> Walk {
    assert!(length >= 1, "walk length must be at least 1");
    if params.schedule.mixing_weight(params.epoch) == 0.0 {
        return uniform_walk(graph, start, length, rng);
    }
    let mut walk = Vec::with_capacity(length);
    let mut cumulative = Vec::new();
    walk.push(start);
    let mut cur = start;
    while walk.len() < length {
        let nbrs = graph.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        let probs = annealed_distribution(
            graph,
            snapshot,
            cur,
            params.epoch,
            &params.schedule,
            params.kind,
        )
        .expect("non-empty neighborhood");
        cumulate(probs, &mut cumulative);
        cur = nbrs[sample_cumulative(&cumulative, rng)];
        walk.push(cur);
    }
    walk
}

/// Per-epoch cumulative transition table for a first-order policy, aligned with the graph's
/// adjacency rows. Equivalent to recomputing [`annealed_distribution`] at every step.
struct TransitionTable {
    cumulative: Vec<f64>,
}

impl TransitionTable {
    fn annealed(graph: &Graph, snapshot: &EmbeddingMatrix, params: &GlobalWalkParams) -> Self {
        let rows: Vec<Vec<f64>> = (0..graph.node_count())
            .into_par_iter()
            .map(|u| {
                let mut row = Vec::new();
                if graph.degree(u) > 0 {
                    let probs = annealed_distribution(
                        graph,
                        snapshot,
                        u,
                        params.epoch,
                        &params.schedule,
                        params.kind,
                    )
                    .expect("non-empty neighborhood");
                    cumulate(probs, &mut row);
                }
                row
            })
            .collect();
        let mut cumulative = Vec::with_capacity(graph.arc_count());
        for row in rows {
            cumulative.extend(row);
        }
        TransitionTable { cumulative }
    }

    fn walk<R: Rng + ?Sized>(
        &self,
        graph: &Graph,
        start: usize,
        length: usize,
        rng: &mut R,
    ) -> Walk {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        let mut cur = start;
        while walk.len() < length {
            let nbrs = graph.neighbors(cur);
            if nbrs.is_empty() {
                break;
            }
            let offset = graph.row_offset(cur);
            let row = &self.cumulative[offset..offset + nbrs.len()];
            cur = nbrs[sample_cumulative(row, rng)];
            walk.push(cur);
        }
        walk
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    /// Walks started at every node (`r`).
    pub walks_per_node: usize,
    /// Maximum walk length (`l`).
    pub walk_length: usize,
    pub seed: u64,
    /// Generate walks sequentially on the calling thread.
    pub deterministic: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            walks_per_node: 10,
            walk_length: 80,
            seed: 0,
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub walks: Vec<Walk>,
    pub walks_per_node: usize,
    pub walk_length: usize,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }

    /// One walk per line, space-separated external node names.
    pub fn write_text<W: Write>(&self, graph: &Graph, mut out: W) -> std::io::Result<()> {
        for walk in &self.walks {
            let line: Vec<&str> = walk.iter().map(|&u| graph.name(u)).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

const ORDER_STREAM: u64 = u64::MAX;

/// Walk start order for one round: all nodes, shuffled with a seeded stream.
pub fn round_order(node_count: usize, seed: u64, round: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..node_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[round as u64, ORDER_STREAM]));
    order.shuffle(&mut rng);
    order
}

/// RNG for the walk started at `start` in `round`.
pub fn walk_rng(seed: u64, round: usize, start: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[round as u64, start as u64]))
}

/// Generates `walks_per_node` rounds of walks, one per node per round in a shuffled order.
///
/// Each walk draws from its own stream derived from `(seed, round, start)`, so parallel and
/// sequential generation produce the same corpus.
pub fn generate_corpus(
    graph: &Graph,
    policy: &WalkPolicy,
    snapshot: Option<&EmbeddingMatrix>,
    config: &CorpusConfig,
) -> Result<Corpus, WalkError> {
    if config.walks_per_node == 0 || config.walk_length == 0 {
        return Err(WalkError::InvalidParameter(
            "walks_per_node and walk_length must be at least 1".into(),
        ));
    }
    let table = match policy {
        WalkPolicy::Uniform => None,
        WalkPolicy::Node2vec(params) => {
            params.validate()?;
            None
        }
        WalkPolicy::GlobalWalk(params) => {
            params.schedule.validate()?;
            if params.schedule.mixing_weight(params.epoch) == 0.0 {
                None
            } else {
                let snapshot = snapshot.ok_or(WalkError::MissingEmbeddings)?;
                if snapshot.rows() != graph.node_count() {
                    return Err(WalkError::ShapeMismatch {
                        rows: snapshot.rows(),
                        nodes: graph.node_count(),
                    });
                }
                Some(TransitionTable::annealed(graph, snapshot, params))
            }
        }
    };

    let n = graph.node_count();
    let jobs: Vec<(usize, usize)> = (0..config.walks_per_node)
        .flat_map(|round| {
            round_order(n, config.seed, round)
                .into_iter()
                .map(move |start| (round, start))
        })
        .collect();

    let make_walk = |&(round, start): &(usize, usize)| -> Walk {
        let mut rng = walk_rng(config.seed, round, start);
        let len = config.walk_length;
        match (policy, &table) {
            (WalkPolicy::Node2vec(params), _) => node2vec_walk(graph, start, len, params, &mut rng),
            (_, Some(table)) => table.walk(graph, start, len, &mut rng),
            _ => uniform_walk(graph, start, len, &mut rng),
        }
    };

    let walks = if config.deterministic {
        jobs.iter().map(make_walk).collect()
    } else {
        jobs.par_iter().map(make_walk).collect()
    };
    Ok(Corpus {
        walks,
        walks_per_node: config.walks_per_node,
        walk_length: config.walk_length,
    })
}
