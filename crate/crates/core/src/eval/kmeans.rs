use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::EvalError;
use crate::embed::EmbeddingMatrix;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub max_iters: usize,
    /// Stop once no centroid moves farther than this.
    pub tolerance: f64,
    pub restarts: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            max_iters: 300,
            tolerance: 1e-6,
            restarts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub assignment: Vec<usize>,
    pub k: usize,
    /// Sum of squared distances to the assigned centroids.
    pub inertia: f64,
}

struct Restart {
    assignment: Vec<usize>,
    inertia: f64,
    /// Inertia after every assignment pass.
    #[cfg_attr(not(test), allow(dead_code))]
    trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters the rows of the embedding's input matrix.
pub fn kmeans(emb: &EmbeddingMatrix, k: usize, seed: u64) -> Result<ClusterAssignment, EvalError> {
    kmeans_points(emb.input(), emb.dim(), k, seed, &KMeansParams::default())
}

/// K-means++ seeding and Lloyd iterations over `restarts` derived seeds; keeps the restart
/// with the lowest inertia (earliest restart on ties).
pub fn kmeans_points(
    data: &[f64],
    dim: usize,
    k: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<ClusterAssignment, EvalError> {
    assert!(
        dim >= 1 && data.len().is_multiple_of(dim),
        "data must hold whole rows"
    );
    let n = data.len() / dim;
    if k == 0 {
        return Err(EvalError::ZeroClusters);
    }
    if k > n {
        return Err(EvalError::TooManyClusters { k, points: n });
    }
    let restarts: Vec<Restart> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[r as u64]));
            run_restart(data, dim, k, params, &mut rng)
        })
        .collect();
    let best = restarts
        .into_iter()
        .reduce(|best, next| {
            if next.inertia < best.inertia {
                next
            } else {
                best
            }
        })
        .expect("at least one restart");
    Ok(ClusterAssignment {
        assignment: best.assignment,
        k,
        inertia: best.inertia,
    })
}

fn plus_plus_init<R: Rng>(data: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = data.len() / dim;
    let row = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut centroids = Vec::with_capacity(k * dim);
    centroids.extend_from_slice(row(rng.random_range(0..n)));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(row(i), &centroids[..dim])).collect();
    while centroids.len() < k * dim {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if r < d {
                    chosen = i;
                    break;
                }
                r -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let start = centroids.len();
        centroids.extend_from_slice(row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), &centroids[start..start + dim]));
        }
    }
    centroids
}

/// Nearest centroid per point (lowest index on ties); returns the inertia.
fn assign(
    data: &[f64],
    dim: usize,
    centroids: &[f64],
    labels: &mut [usize],
    dists: &mut [f64],
) -> f64 {
    let mut inertia = 0.0;
    for (i, point) in data.chunks_exact(dim).enumerate() {
        let (best, d) = centroids
            .chunks_exact(dim)
            .map(|c| sq_dist(point, c))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (j, d)| if d < acc.1 { (j, d) } else { acc },
            );
        labels[i] = best;
        dists[i] = d;
        inertia += d;
    }
    inertia
}

fn run_restart<R: Rng>(
    data: &[f64],
    dim: usize,
    k: usize,
    params: &KMeansParams,
    rng: &mut R,
) -> Restart {
    let n = data.len() / dim;
    let mut centroids = plus_plus_init(data, dim, k, rng);
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    let mut trace = Vec::new();

    for _ in 0..params.max_iters {
        trace.push(assign(data, dim, &centroids, &mut labels, &mut dists));

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, point) in data.chunks_exact(dim).enumerate() {
            let c = labels[i];
            counts[c] += 1;
            sums[c * dim..(c + 1) * dim]
                .iter_mut()
                .zip(point)
                .for_each(|(s, x)| *s += x);
        }
        for c in 0..k {
            if counts[c] == 0 {
                // re-seed from the point farthest from its centroid
                let far = (0..n)
                    .filter(|&i| counts[labels[i]] > 1)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
                if let Some(far) = far {
                    let old = labels[far];
                    counts[old] -= 1;
                    let point = &data[far * dim..(far + 1) * dim];
                    sums[old * dim..(old + 1) * dim]
                        .iter_mut()
                        .zip(point)
                        .for_each(|(s, x)| *s -= x);
                    sums[c * dim..(c + 1) * dim].copy_from_slice(point);
                    counts[c] = 1;
                    labels[far] = c;
                    dists[far] = 0.0;
                } else {
                    // every other cluster is a singleton: keep the old centroid
                    sums[c * dim..(c + 1) * dim]
                        .copy_from_slice(&centroids[c * dim..(c + 1) * dim]);
                    counts[c] = 1;
                }
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            let inv = 1.0 / counts[c] as f64;
            for j in 0..dim {
                let updated = sums[c * dim + j] * inv;
                let delta = updated - centroids[c * dim + j];
                centroids[c * dim + j] = updated;
                shift = shift.max(delta.abs());
            }
        }
        if shift < params.tolerance {
            break;
        }
    }
    let inertia = assign(data, dim, &centroids, &mut labels, &mut dists);
    trace.push(inertia);
    Restart {
        assignment: labels,
        inertia,
        trace,
    }
}
