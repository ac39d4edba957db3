use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::embed::EmbeddingMatrix;
use crate::graph::Graph;
use crate::rng::derive_seed;

/// Held-out edges and sampled non-edges for link prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSplit {
    pub train_graph: Graph,
    pub pos_test: Vec<(usize, usize)>,
    pub neg_test: Vec<(usize, usize)>,
}

const SHUFFLE_STREAM: u64 = 0;
const NEGATIVE_STREAM: u64 = 1;

/// Moves about `test_fraction` of the edges into a positive test set without leaving any
/// node isolated, then samples as many non-edges of the original graph.
pub fn split_edges(graph: &Graph, test_fraction: f64, seed: u64) -> Result<LinkSplit, EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(test_fraction));
    }
    let n = graph.node_count();
    let mut edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[SHUFFLE_STREAM]));
    edges.shuffle(&mut rng);

    let wanted = (test_fraction * edges.len() as f64).ceil() as usize;
    let mut pos_test = Vec::with_capacity(wanted);
    let mut train = Vec::with_capacity(edges.len());
    for (u, v) in edges {
        if pos_test.len() < wanted && degree[u] > 1 && degree[v] > 1 {
            degree[u] -= 1;
            degree[v] -= 1;
            pos_test.push((u, v));
        } else {
            train.push((u, v));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[NEGATIVE_STREAM]));
    let budget = 100 * pos_test.len();
    let mut seen = HashSet::with_capacity(pos_test.len());
    let mut neg_test = Vec::with_capacity(pos_test.len());
    let mut attempts = 0;
    while neg_test.len() < pos_test.len() {
        if attempts == budget {
            return Err(EvalError::TooDense {
                found: neg_test.len(),
                wanted: pos_test.len(),
                attempts,
            });
        }
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || graph.has_edge(u, v) {
            continue;
        }
        let key = if graph.is_directed() {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        };
        if seen.insert(key) {
            neg_test.push(key);
        }
    }

    Ok(LinkSplit {
        train_graph: graph.with_edges(&train),
        pos_test,
        neg_test,
    })
}

/// `1 / (1 + ||phi(u) - phi(v)||)`.
pub fn link_score(emb: &EmbeddingMatrix, u: usize, v: usize) -> f64 {
    1.0 / (1.0 + emb.distance(u, v))
}

/// How a positive and a negative with equal scores count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Ties count as failures (strict `neg < pos`).
    #[default]
    Strict,
    /// Ties count half.
    HalfCredit,
}

/// Fraction of (negative, positive) pairs ranked correctly, computed by sorting.
pub fn auc(pos: &[f64], neg: &[f64], ties: TieRule) -> Result<f64, EvalError> {
    if pos.is_empty() || neg.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    if pos.iter().chain(neg).any(|x| x.is_nan()) {
        return Err(EvalError::NanScore);
    }
    let mut sorted = neg.to_vec();
    sorted.sort_by(f64::total_cmp);
    // twice the credit, to keep half-credit ties in integers
    let mut doubled: u128 = 0;
    for &p in pos {
        let below = sorted.partition_point(|&x| x < p) as u128;
        doubled += 2 * below;
        if ties == TieRule::HalfCredit {
            let upto = sorted.partition_point(|&x| x <= p) as u128;
            doubled += upto - below;
        }
    }
    Ok(doubled as f64 / (2 * pos.len() as u128 * neg.len() as u128) as f64)
}
