//! Skip-Gram training with negative sampling, plus the exact softmax used as a test oracle.

use rand::Rng;
use thiserror::Error;

use crate::embed::EmbeddingMatrix;
use crate::walk::Corpus;

/// Attempts at drawing a negative distinct from the positive context before giving up.
const MAX_RESAMPLE: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error(
        "non-finite loss {loss} at center {center}, context {context} (lr {lr}); training aborted"
    )]
    NonFinite {
        center: usize,
        context: usize,
        lr: f64,
        loss: f64,
    },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("corpus references node {node} but the embedding has {rows} rows")]
    NodeOutOfRange { node: usize, rows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Context radius.
    pub window: usize,
    /// Negative samples per positive pair.
    pub negatives: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// Exponent applied to corpus frequencies for the noise distribution.
    pub noise_power: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            window: 10,
            negatives: 5,
            lr_start: 0.025,
            lr_end: 1e-4,
            noise_power: 0.75,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.window < 1 {
            return Err(TrainError::InvalidConfig("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(TrainError::InvalidConfig("negatives must be >= 1".into()));
        }
        if !(self.lr_start > self.lr_end && self.lr_end > 0.0) {
            return Err(TrainError::InvalidConfig(format!(
                "need lr_start > lr_end > 0, got {} and {}",
                self.lr_start, self.lr_end
            )));
        }
        if !self.noise_power.is_finite() {
            return Err(TrainError::InvalidConfig(
                "noise_power must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Linearly decayed step size at overall training progress `fraction` in `[0, 1]`.
    pub fn learning_rate(&self, fraction: f64) -> f64 {
        let f = fraction.clamp(0.0, 1.0);
        self.lr_start - (self.lr_start - self.lr_end) * f
    }
}

/// Noise distribution over nodes, proportional to corpus frequency raised to a power.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    pub fn from_counts(counts: &[u64], power: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                if c > 0 {
                    acc += (c as f64).powf(power);
                }
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    pub fn from_corpus(corpus: &Corpus, node_count: usize, power: f64) -> Self {
        let mut counts = vec![0u64; node_count];
        for walk in &corpus.walks {
            for &u in walk {
                counts[u] += 1;
            }
        }
        Self::from_counts(&counts, power)
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.total() <= 0.0
    }

    pub fn probability(&self, u: usize) -> f64 {
        let prev = if u == 0 { 0.0 } else { self.cumulative[u - 1] };
        (self.cumulative[u] - prev) / self.total()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r = rng.random::<f64>() * self.total();
        self.cumulative
            .partition_point(|&c| c <= r)
            .min(self.cumulative.len() - 1)
    }
}

/// `(center, context)` pairs for every position and every other position within `window`.
pub fn context_pairs(walk: &[usize], window: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..walk.len()).flat_map(move |i| {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(walk.len() - 1);
        (lo..=hi)
            .filter(move |&j| j != i)
            .map(move |j| (walk[i], walk[j]))
    })
}

fn context_pair_count(walk_len: usize, window: usize) -> usize {
    (0..walk_len)
        .map(|i| (i + window).min(walk_len - 1) - i.saturating_sub(window))
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ln(sigmoid(x))`, stable for large `|x|`.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Negative-sampling loss for one positive pair:
/// `-ln sigmoid(c·h) - sum_n ln sigmoid(-n·h)` with `h` the center's input vector.
pub fn sgns_loss(emb: &EmbeddingMatrix, center: usize, context: usize, negatives: &[usize]) -> f64 {
    let h = emb.row(center);
    let mut loss = -log_sigmoid(dot(emb.context_row(context), h));
    for &n in negatives {
        loss -= log_sigmoid(-dot(emb.context_row(n), h));
    }
    loss
}

/// Gradients of [`sgns_loss`].
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient {
    /// With respect to the center's input row.
    pub center: Vec<f64>,
    /// With respect to each target's context row, in order `[context, negatives...]`.
    /// A node repeated among the targets appears once per occurrence.
    pub targets: Vec<(usize, Vec<f64>)>,
}

pub fn sgns_gradient(
    emb: &EmbeddingMatrix,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> SgnsGradient {
    let h = emb.row(center);
    let mut grad_center = vec![0.0; emb.dim()];
    let mut targets = Vec::with_capacity(negatives.len() + 1);
    let labelled = std::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
    for (t, label) in labelled {
        let out = emb.context_row(t);
        // d/ds of -ln sigmoid(s) is sigmoid(s) - 1; of -ln sigmoid(-s) it is sigmoid(s)
        let g = sigmoid(dot(out, h)) - label;
        grad_center
            .iter_mut()
            .zip(out)
            .for_each(|(acc, o)| *acc += g * o);
        targets.push((t, h.iter().map(|x| g * x).collect()));
    }
    SgnsGradient {
        center: grad_center,
        targets,
    }
}

/// One gradient-descent step on [`sgns_loss`]. Returns the loss before the update.
///
/// All gradients are evaluated at the incoming parameters before any row is written.
pub fn sgns_step(
    emb: &mut EmbeddingMatrix,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f64,
) -> Result<f64, TrainError> {
    let dim = emb.dim();
    let (input, output) = emb.split_mut();
    let h = &input[center * dim..(center + 1) * dim];

    let mut loss = 0.0;
    let mut coeffs = [0.0f64; 16];
    let mut coeffs_heap;
    let coeffs: &mut [f64] = if negatives.len() < coeffs.len() {
        &mut coeffs[..negatives.len() + 1]
    } else {
        coeffs_heap = vec![0.0; negatives.len() + 1];
        &mut coeffs_heap
    };
    let mut grad_center = [0.0f64; 128];
    let mut grad_heap;
    let grad_center: &mut [f64] = if dim <= grad_center.len() {
        &mut grad_center[..dim]
    } else {
        grad_heap = vec![0.0; dim];
        &mut grad_heap
    };

    let targets = std::iter::once(context).chain(negatives.iter().copied());
    for (k, t) in targets.enumerate() {
        let out = &output[t * dim..(t + 1) * dim];
        let s = dot(out, h);
        let (label, signed) = if k == 0 { (1.0, s) } else { (0.0, -s) };
        loss -= log_sigmoid(signed);
        let g = sigmoid(s) - label;
        coeffs[k] = g;
        grad_center
            .iter_mut()
            .zip(out)
            .for_each(|(acc, o)| *acc += g * o);
    }
    if !loss.is_finite() {
        return Err(TrainError::NonFinite {
            center,
            context,
            lr,
            loss,
        });
    }

    let targets = std::iter::once(context).chain(negatives.iter().copied());
    for (k, t) in targets.enumerate() {
        let step = lr * coeffs[k];
        let out = &mut output[t * dim..(t + 1) * dim];
        out.iter_mut().zip(h).for_each(|(o, x)| *o -= step * x);
    }
    input[center * dim..(center + 1) * dim]
        .iter_mut()
        .zip(grad_center.iter())
        .for_each(|(x, g)| *x -= lr * g);
    Ok(loss)
}

/// Exact softmax probability of `v` given `u` over all nodes, using context vectors for the
/// candidates. Enumerates every node; intended for small graphs.
pub fn softmax_prob(emb: &EmbeddingMatrix, u: usize, v: usize) -> f64 {
    let h = emb.row(u);
    let logits: Vec<f64> = (0..emb.rows())
        .map(|w| dot(emb.context_row(w), h))
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = logits.iter().map(|l| (l - max).exp()).sum();
    (logits[v] - max).exp() / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub pairs: usize,
    pub mean_loss: f64,
}

/// Trains over every context pair of every walk, in corpus order.
///
/// The step size decays linearly with overall progress, moving from `progress.0` to
/// `progress.1` across this corpus's pairs. Training continues from the incoming matrices,
/// so consecutive calls with adjacent progress ranges and a shared `rng` behave as one pass
/// over the concatenated corpora.
pub fn train_epoch<R: Rng + ?Sized>(
    corpus: &Corpus,
    emb: &mut EmbeddingMatrix,
    noise: &NoiseTable,
    cfg: &TrainConfig,
    progress: (f64, f64),
    rng: &mut R,
) -> Result<EpochStats, TrainError> {
    cfg.validate()?;
    let rows = emb.rows();
    if let Some(&node) = corpus.walks.iter().flatten().find(|&&u| u >= rows) {
        return Err(TrainError::NodeOutOfRange { node, rows });
    }
    let total_pairs: usize = corpus
        .walks
        .iter()
        .map(|w| context_pair_count(w.len(), cfg.window))
        .sum();
    if total_pairs == 0 {
        return Ok(EpochStats {
            pairs: 0,
            mean_loss: 0.0,
        });
    }
    if noise.is_empty() {
        return Err(TrainError::InvalidConfig("noise table has no mass".into()));
    }

    let (from, to) = progress;
    let mut negatives = Vec::with_capacity(cfg.negatives);
    let mut done = 0usize;
    let mut loss_sum = 0.0;
    for walk in &corpus.walks {
        for (center, context) in context_pairs(walk, cfg.window) {
            let fraction = from + (to - from) * (done as f64 / total_pairs as f64);
            let lr = cfg.learning_rate(fraction);
            negatives.clear();
            for _ in 0..cfg.negatives {
                let drawn = (0..MAX_RESAMPLE)
                    .map(|_| noise.sample(rng))
                    .find(|&n| n != context);
                if let Some(n) = drawn {
                    negatives.push(n);
                }
            }
            loss_sum += sgns_step(emb, center, context, &negatives, lr)?;
            done += 1;
        }
    }
    Ok(EpochStats {
        pairs: done,
        mean_loss: loss_sum / done as f64,
    })
}
