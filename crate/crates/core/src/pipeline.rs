//! Epoch loop (walk, train, re-bias), evaluation, output files and the ablation grid.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ConfigMap, Method, RunConfig, Task};
use crate::embed::{save_embeddings, EmbedError, EmbeddingMatrix};
use crate::eval::{
    accuracy, auc, kmeans, link_score, split_edges, write_assignments, ClusterAssignment,
    EvalError, EvalReport, LinkSplit, TieRule, REPORT_COLUMNS,
};
use crate::graph::{load_edge_list, load_labels, Graph, GraphError, LabelMap};
use crate::rng::derive_seed;
use crate::skipgram::{train_epoch, EpochStats, NoiseTable, TrainError};
use crate::walk::{
    generate_corpus, AnnealSchedule, Corpus, CorpusConfig, GlobalWalkParams, LikelihoodKind,
    WalkError, WalkPolicy,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("embeddings: {0}")]
    Embed(#[from] EmbedError),
    #[error("walks: {0}")]
    Walk(#[from] WalkError),
    #[error("training: {0}")]
    Train(#[from] TrainError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("community detection needs a label file")]
    MissingLabels,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

// stream tags for seeds derived from the run seed
const INIT_STREAM: u64 = 1;
const WALK_STREAM: u64 = 2;
const TRAIN_STREAM: u64 = 3;
const KMEANS_STREAM: u64 = 4;
const SPLIT_STREAM: u64 = 5;

/// Callbacks at the epoch boundaries of [`train_embeddings`].
pub trait EpochObserver {
    /// Walks for `epoch` were generated against a matrix with this checksum.
    fn walks_generated(&mut self, _epoch: usize, _snapshot_checksum: u64, _corpus: &Corpus) {}
    /// Training for `epoch` finished; `checksum` is the updated matrix.
    fn epoch_trained(&mut self, _epoch: usize, _checksum: u64, _stats: &EpochStats) {}
}

struct NoObserver;
impl EpochObserver for NoObserver {}

/// Walk policy of `method` at epoch `t`.
pub fn policy_for(method: &Method, task: Task, epoch: usize) -> WalkPolicy {
    match *method {
        Method::DeepWalk => WalkPolicy::Uniform,
        Method::Node2vec { .. } => {
            WalkPolicy::Node2vec(method.node2vec_params(task).expect("node2vec method"))
        }
        Method::GlobalWalk { likelihood, beta } => WalkPolicy::GlobalWalk(GlobalWalkParams {
            kind: likelihood,
            schedule: AnnealSchedule::new(beta),
            epoch,
        }),
    }
}

/// Runs the epoch loop on `graph`: each epoch generates a fresh corpus against the
/// embedding as it stood at the end of the previous epoch, then trains on it.
pub fn train_embeddings(
    graph: &Graph,
    cfg: &RunConfig,
    observer: &mut dyn EpochObserver,
) -> Result<(EmbeddingMatrix, Vec<EpochStats>), PipelineError> {
    cfg.validate()?;
    let mut emb = EmbeddingMatrix::init(
        graph.node_count(),
        cfg.dim,
        derive_seed(cfg.seed, &[INIT_STREAM]),
    );
    let mut stats = Vec::with_capacity(cfg.epochs);
    for t in 0..cfg.epochs {
        let policy = policy_for(&cfg.method, cfg.task, t);
        let corpus_cfg = CorpusConfig {
            walks_per_node: cfg.walks,
            walk_length: cfg.length,
            seed: derive_seed(cfg.seed, &[WALK_STREAM, t as u64]),
            deterministic: cfg.deterministic,
        };
        let corpus = generate_corpus(graph, &policy, Some(&emb), &corpus_cfg)?;
        observer.walks_generated(t, emb.checksum(), &corpus);

        let noise = NoiseTable::from_corpus(&corpus, graph.node_count(), cfg.train.noise_power);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[TRAIN_STREAM, t as u64]));
        let progress = (
            t as f64 / cfg.epochs as f64,
            (t + 1) as f64 / cfg.epochs as f64,
        );
        let epoch = train_epoch(&corpus, &mut emb, &noise, &cfg.train, progress, &mut rng)?;
        log::info!(
            "epoch {}, pairs processed {}, mean loss {:.6}",
            t,
            epoch.pairs,
            epoch.mean_loss
        );
        observer.epoch_trained(t, emb.checksum(), &epoch);
        stats.push(epoch);
    }
    Ok((emb, stats))
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub graph: Graph,
    pub embeddings: EmbeddingMatrix,
    pub report: EvalReport,
    pub epochs: Vec<EpochStats>,
    pub clusters: Option<ClusterAssignment>,
    pub split: Option<LinkSplit>,
}

pub fn load_graph(cfg: &RunConfig) -> Result<Graph, PipelineError> {
    let graph = load_edge_list(&cfg.edges, cfg.directed)?;
    Ok(if cfg.symmetrize && graph.is_directed() {
        graph.symmetrized()
    } else {
        graph
    })
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    run_pipeline_observed(cfg, &mut NoObserver)
}

pub fn run_pipeline_observed(
    cfg: &RunConfig,
    observer: &mut dyn EpochObserver,
) -> Result<PipelineOutput, PipelineError> {
    cfg.validate()?;
    let graph = load_graph(cfg)?;
    let labels = match (&cfg.labels, cfg.task) {
        (Some(path), _) => Some(load_labels(path, &graph)?),
        (None, Task::Cd) => return Err(PipelineError::MissingLabels),
        (None, Task::Lp) => None,
    };
    run_on_graph(cfg, graph, labels.as_ref(), observer)
}

/// Trains and evaluates on an already loaded graph.
pub fn run_on_graph(
    cfg: &RunConfig,
    graph: Graph,
    labels: Option<&LabelMap>,
    observer: &mut dyn EpochObserver,
) -> Result<PipelineOutput, PipelineError> {
    let started = Instant::now();
    let (embeddings, epochs, value, clusters, split) = match cfg.task {
        Task::Cd => {
            let labels = labels.ok_or(PipelineError::MissingLabels)?;
            let (emb, epochs) = train_embeddings(&graph, cfg, observer)?;
            let clusters = cluster_for_seed(&emb, labels.k(), cfg.seed)?;
            let acc = accuracy(&clusters, labels)?;
            (emb, epochs, acc, Some(clusters), None)
        }
        Task::Lp => {
            let split = split_for_seed(&graph, cfg.test_fraction, cfg.seed)?;
            let (emb, epochs) = train_embeddings(&split.train_graph, cfg, observer)?;
            let value = split_auc(&emb, &split)?;
            (emb, epochs, value, None, Some(split))
        }
    };
    let elapsed = started.elapsed().as_secs_f64();
    log::info!(
        "{} = {:.6} in {:.2}s",
        metric_name(cfg.task),
        value,
        elapsed
    );
    let report = build_report(cfg, value, if cfg.deterministic { 0.0 } else { elapsed });
    Ok(PipelineOutput {
        graph,
        embeddings,
        report,
        epochs,
        clusters,
        split,
    })
}

/// The link-prediction split a run with this seed uses.
pub fn split_for_seed(
    graph: &Graph,
    test_fraction: f64,
    seed: u64,
) -> Result<LinkSplit, EvalError> {
    split_edges(graph, test_fraction, derive_seed(seed, &[SPLIT_STREAM]))
}

/// The K-Means clustering a community-detection run with this seed uses.
pub fn cluster_for_seed(
    emb: &EmbeddingMatrix,
    k: usize,
    seed: u64,
) -> Result<ClusterAssignment, EvalError> {
    kmeans(emb, k, derive_seed(seed, &[KMEANS_STREAM]))
}

/// Reorders loaded embedding rows to match the graph's node indices by name.
pub fn align_embeddings(
    graph: &Graph,
    emb: &EmbeddingMatrix,
    names: &[String],
) -> Result<EmbeddingMatrix, PipelineError> {
    let by_name: std::collections::HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut values = Vec::with_capacity(graph.node_count() * emb.dim());
    for name in graph.names() {
        let row = by_name
            .get(name.as_str())
            .ok_or_else(|| EmbedError::Format {
                line: 0,
                message: format!("no embedding for node '{name}'"),
            })?;
        values.extend_from_slice(emb.row(*row));
    }
    Ok(EmbeddingMatrix::from_rows(
        graph.node_count(),
        emb.dim(),
        values,
    ))
}

/// Strict-inequality AUC of the held-out edges against the sampled non-edges.
pub fn split_auc(emb: &EmbeddingMatrix, split: &LinkSplit) -> Result<f64, EvalError> {
    let pos: Vec<f64> = split
        .pos_test
        .iter()
        .map(|&(u, v)| link_score(emb, u, v))
        .collect();
    let neg: Vec<f64> = split
        .neg_test
        .iter()
        .map(|&(u, v)| link_score(emb, u, v))
        .collect();
    auc(&pos, &neg, TieRule::Strict)
}

fn metric_name(task: Task) -> &'static str {
    match task {
        Task::Cd => "acc",
        Task::Lp => "auc",
    }
}

fn build_report(cfg: &RunConfig, value: f64, seconds: f64) -> EvalReport {
    let (likelihood, beta) = match cfg.method {
        Method::GlobalWalk { likelihood, beta } => (likelihood.to_string(), Some(beta)),
        _ => ("-".to_owned(), None),
    };
    let mut hyperparameters: BTreeMap<String, String> = cfg
        .to_map()
        .into_iter()
        .filter(|(k, _)| {
            !matches!(
                k.as_str(),
                "edges" | "labels" | "dataset" | "task" | "method" | "likelihood" | "beta" | "seed"
            )
        })
        .collect();
    if let Some(params) = cfg.method.node2vec_params(cfg.task) {
        hyperparameters.insert("p".into(), params.p.to_string());
        hyperparameters.insert("q".into(), params.q.to_string());
    }
    EvalReport {
        dataset: cfg.dataset_id(),
        task: cfg.task.to_string(),
        method: cfg.method.name().to_owned(),
        likelihood,
        beta,
        seed: cfg.seed.to_string(),
        metric: metric_name(cfg.task).to_owned(),
        value,
        seconds,
        hyperparameters,
    }
}

/// File names written by [`write_outputs`].
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const REPORT_CSV_FILE: &str = "report.csv";
pub const REPORT_KV_FILE: &str = "report.txt";
pub const ASSIGNMENTS_FILE: &str = "assignments.csv";
pub const CONFIG_FILE: &str = "config.txt";

/// Writes embeddings, reports, config and (for community detection) assignments into
/// `dir`. Files already written are removed if a later one fails.
pub fn write_outputs(
    dir: &Path,
    cfg: &RunConfig,
    out: &PipelineOutput,
) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let result = (|| -> Result<(), PipelineError> {
        let path = dir.join(EMBEDDINGS_FILE);
        written.push(path.clone());
        save_embeddings(&out.embeddings, out.graph.names(), &path)?;

        let path = dir.join(REPORT_CSV_FILE);
        written.push(path.clone());
        out.report
            .write_csv(BufWriter::new(fs::File::create(&path)?))?;

        let path = dir.join(REPORT_KV_FILE);
        written.push(path.clone());
        fs::write(&path, format!("{}\n", out.report.to_kv_line()))?;

        let path = dir.join(CONFIG_FILE);
        written.push(path.clone());
        fs::write(&path, cfg.to_kv())?;

        if let Some(clusters) = &out.clusters {
            let path = dir.join(ASSIGNMENTS_FILE);
            written.push(path.clone());
            write_assignments(
                &out.graph,
                clusters,
                BufWriter::new(fs::File::create(&path)?),
            )?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for path in &written {
                let _ = fs::remove_file(path);
            }
            Err(e)
        }
    }
}

/// Runs the pipeline and writes its outputs, leaving no partial files on failure.
pub fn run_to_dir(cfg: &RunConfig, dir: &Path) -> Result<PipelineOutput, PipelineError> {
    let out = run_pipeline(cfg)?;
    write_outputs(dir, cfg, &out)?;
    Ok(out)
}

/// Likelihood and annealing-factor sweep around a base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationGrid {
    pub likelihoods: Vec<LikelihoodKind>,
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl AblationGrid {
    /// Reads `likelihoods`, `betas` and `seeds` (comma-separated) from a config map and
    /// returns the grid plus the remaining base-config keys.
    pub fn from_map(map: &ConfigMap) -> Result<(Self, ConfigMap), ConfigError> {
        let mut rest = map.clone();
        fn list<T: std::str::FromStr>(
            rest: &mut ConfigMap,
            key: &'static str,
        ) -> Result<Vec<T>, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            let raw = rest.remove(key).ok_or(ConfigError::Missing(key))?;
            raw.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>().map_err(|e| ConfigError::Invalid {
                        key: key.into(),
                        value: s.into(),
                        reason: e.to_string(),
                    })
                })
                .collect()
        }
        let grid = AblationGrid {
            likelihoods: list(&mut rest, "likelihoods")?,
            betas: list(&mut rest, "betas")?,
            seeds: list(&mut rest, "seeds")?,
        };
        Ok((grid, rest))
    }

    /// `likelihoods × {base beta}` followed by `{base likelihood} × betas`, without repeats.
    pub fn cells(
        &self,
        base_likelihood: LikelihoodKind,
        base_beta: f64,
    ) -> Vec<(LikelihoodKind, f64)> {
        let mut cells: Vec<(LikelihoodKind, f64)> = Vec::new();
        let candidates = self
            .likelihoods
            .iter()
            .map(|&k| (k, base_beta))
            .chain(self.betas.iter().map(|&b| (base_likelihood, b)));
        for cell in candidates {
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        }
        cells
    }
}

/// One CSV row of an ablation report.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub likelihood: LikelihoodKind,
    pub beta: f64,
    /// A seed, or `"mean"` / `"std"` for summary rows.
    pub seed: String,
    pub metric: String,
    pub value: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub dataset: String,
    pub task: Task,
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(REPORT_COLUMNS)?;
        for row in &self.rows {
            writer.write_record([
                self.dataset.clone(),
                self.task.to_string(),
                "globalwalk".to_owned(),
                row.likelihood.to_string(),
                row.beta.to_string(),
                row.seed.clone(),
                row.metric.clone(),
                format!("{:.6}", row.value),
                format!("{:.3}", row.seconds),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Per-run rows (summary rows excluded) for one cell.
    pub fn runs(
        &self,
        likelihood: LikelihoodKind,
        beta: f64,
    ) -> impl Iterator<Item = &AblationRow> {
        self.rows.iter().filter(move |r| {
            r.likelihood == likelihood && r.beta == beta && r.seed != "mean" && r.seed != "std"
        })
    }
}

/// Runs the base configuration (as GlobalWalk) for every grid cell and seed. Cells and
/// seeds run in parallel; a failed run becomes an error row and the grid continues.
pub fn ablate(base: &RunConfig, grid: &AblationGrid) -> Result<AblationReport, PipelineError> {
    if grid.likelihoods.is_empty() || grid.betas.is_empty() || grid.seeds.is_empty() {
        return Err(ConfigError::Invalid {
            key: "grid".into(),
            value: format!("{grid:?}"),
            reason: "likelihoods, betas and seeds must be non-empty".into(),
        }
        .into());
    }
    let (base_kind, base_beta) = match base.method {
        Method::GlobalWalk { likelihood, beta } => (likelihood, beta),
        _ => (LikelihoodKind::Exp, 0.2),
    };
    let graph = load_graph(base)?;
    let labels = match (&base.labels, base.task) {
        (Some(path), _) => Some(load_labels(path, &graph)?),
        (None, Task::Cd) => return Err(PipelineError::MissingLabels),
        (None, Task::Lp) => None,
    };
    let cells = grid.cells(base_kind, base_beta);
    let jobs: Vec<(LikelihoodKind, f64, u64)> = cells
        .iter()
        .flat_map(|&(k, b)| grid.seeds.iter().map(move |&s| (k, b, s)))
        .collect();
    let metric = metric_name(base.task);
    let results: Vec<AblationRow> = jobs
        .par_iter()
        .map(|&(likelihood, beta, seed)| {
            let mut cfg = base.clone();
            cfg.method = Method::GlobalWalk { likelihood, beta };
            cfg.seed = seed;
            let outcome = run_on_graph(&cfg, graph.clone(), labels.as_ref(), &mut NoObserver);
            match outcome {
                Ok(out) => AblationRow {
                    likelihood,
                    beta,
                    seed: seed.to_string(),
                    metric: metric.to_owned(),
                    value: out.report.value,
                    seconds: out.report.seconds,
                },
                Err(e) => AblationRow {
                    likelihood,
                    beta,
                    seed: seed.to_string(),
                    metric: format!("error: {e}"),
                    value: f64::NAN,
                    seconds: 0.0,
                },
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len() + 2 * cells.len());
    for &(likelihood, beta) in &cells {
        let runs: Vec<&AblationRow> = results
            .iter()
            .filter(|r| r.likelihood == likelihood && r.beta == beta)
            .collect();
        let ok: Vec<f64> = runs
            .iter()
            .filter(|r| r.metric == metric)
            .map(|r| r.value)
            .collect();
        let (mean, std) = mean_std(&ok);
        let seconds = runs.iter().map(|r| r.seconds).sum::<f64>() / runs.len() as f64;
        rows.extend(runs.into_iter().cloned());
        for (label, value) in [("mean", mean), ("std", std)] {
            rows.push(AblationRow {
                likelihood,
                beta,
                seed: label.to_owned(),
                metric: metric.to_owned(),
                value,
                seconds,
            });
        }
    }
    Ok(AblationReport {
        dataset: base.dataset_id(),
        task: base.task,
        rows,
    })
}

/// Mean and sample standard deviation (0 for a single value, NaN for none).
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
