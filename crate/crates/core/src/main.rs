use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use walkembed::config::{parse_kv, ConfigMap, RunConfig, Task};
use walkembed::embed::load_embeddings;
use walkembed::eval::{accuracy, auc, link_score, write_assignments, TieRule};
use walkembed::graph::load_labels;
use walkembed::pipeline::{
    ablate, align_embeddings, cluster_for_seed, load_graph, policy_for, run_to_dir, split_for_seed,
    AblationGrid,
};
use walkembed::walk::{generate_corpus, CorpusConfig};

#[derive(Parser)]
#[command(
    name = "walkembed",
    version,
    about = "Random-walk node embeddings and their evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train embeddings and evaluate them (community detection or link prediction).
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        /// Output directory for embeddings, reports and assignments.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate one epoch of walks and print them with external node names.
    Walk {
        #[command(flatten)]
        run: RunArgs,
        /// Epoch index; the annealed walker needs --embeddings once this is above 0.
        #[arg(long, default_value_t = 0)]
        epoch: usize,
        /// Embedding snapshot that biases the annealed walker.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Write the corpus here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster an embedding file with K-Means and score it against labels.
    EvalCd {
        #[command(flatten)]
        target: EvalArgs,
        #[arg(long)]
        labels: PathBuf,
        /// Also write node_id,cluster_id rows here.
        #[arg(long)]
        assignments: Option<PathBuf>,
    },
    /// Score an embedding file on the held-out edges of the seeded split.
    EvalLp {
        #[command(flatten)]
        target: EvalArgs,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// Count score ties as half a correct ranking.
        #[arg(long)]
        tie_half_credit: bool,
    },
    /// Run the likelihood / annealing-factor grid described in a key=value file.
    Ablate {
        #[arg(long)]
        grid: PathBuf,
        /// CSV output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run settings. Each flag overrides the key of the same name from --config.
#[derive(Args, Default)]
struct RunArgs {
    /// key=value file with defaults for any of the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    edges: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    symmetrize: bool,
    /// deepwalk, node2vec or globalwalk
    #[arg(long)]
    method: Option<String>,
    /// inv, thr or exp
    #[arg(long)]
    likelihood: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// cd or lp
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    walks: Option<String>,
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    negatives: Option<String>,
    #[arg(long)]
    lr_start: Option<String>,
    #[arg(long)]
    lr_end: Option<String>,
    #[arg(long)]
    noise_power: Option<String>,
    #[arg(long)]
    test_fraction: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    dataset: Option<String>,
}

impl RunArgs {
    fn into_map(self, defaults: &[(&str, &str)]) -> Result<ConfigMap> {
        let mut map = match &self.config {
            Some(path) => parse_kv(
                &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            )?,
            None => ConfigMap::new(),
        };
        for (k, v) in defaults {
            map.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
        let flags = [
            ("edges", self.edges),
            ("labels", self.labels),
            ("method", self.method),
            ("likelihood", self.likelihood),
            ("beta", self.beta),
            ("p", self.p),
            ("q", self.q),
            ("task", self.task),
            ("epochs", self.epochs),
            ("walks", self.walks),
            ("length", self.length),
            ("window", self.window),
            ("dim", self.dim),
            ("negatives", self.negatives),
            ("lr-start", self.lr_start),
            ("lr-end", self.lr_end),
            ("noise-power", self.noise_power),
            ("test-fraction", self.test_fraction),
            ("seed", self.seed),
            ("dataset", self.dataset),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                map.insert(key.to_owned(), v);
            }
        }
        for (key, set) in [
            ("directed", self.directed),
            ("symmetrize", self.symmetrize),
            ("deterministic", self.deterministic),
        ] {
            if set {
                map.insert(key.to_owned(), "true".to_owned());
            }
        }
        Ok(map)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    symmetrize: bool,
    /// Embedding file in the text format written by `pipeline`.
    #[arg(long)]
    embeddings: PathBuf,
    /// Run seed (selects the K-Means restarts or the edge split).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EvalArgs {
    fn config(&self, task: Task) -> RunConfig {
        let mut cfg = RunConfig::new(&self.edges, walkembed::Method::DeepWalk, task);
        cfg.directed = self.directed;
        cfg.symmetrize = self.symmetrize;
        cfg.seed = self.seed;
        cfg
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pipeline { run, out } => {
            let cfg = RunConfig::from_map(&run.into_map(&[])?)?;
            let output = run_to_dir(&cfg, &out)?;
            println!("{}", output.report.to_kv_line());
        }
        Command::Walk {
            run,
            epoch,
            embeddings,
            out,
        } => {
            let cfg = RunConfig::from_map(&run.into_map(&[("task", "cd")])?)?;
            let graph = load_graph(&cfg)?;
            let snapshot = match embeddings {
                Some(path) => {
                    let (emb, names) = load_embeddings(&path)?;
                    Some(align_embeddings(&graph, &emb, &names)?)
                }
                None => None,
            };
            let policy = policy_for(&cfg.method, cfg.task, epoch);
            let corpus = generate_corpus(
                &graph,
                &policy,
                snapshot.as_ref(),
                &CorpusConfig {
                    walks_per_node: cfg.walks,
                    walk_length: cfg.length,
                    seed: cfg.seed,
                    deterministic: cfg.deterministic,
                },
            )?;
            match out {
                Some(path) => corpus.write_text(&graph, BufWriter::new(fs::File::create(path)?))?,
                None => corpus.write_text(&graph, BufWriter::new(io::stdout().lock()))?,
            }
        }
        Command::EvalCd {
            target,
            labels,
            assignments,
        } => {
            let cfg = target.config(Task::Cd);
            let graph = load_graph(&cfg)?;
            let labels = load_labels(&labels, &graph)?;
            let (emb, names) = load_embeddings(&target.embeddings)?;
            let emb = align_embeddings(&graph, &emb, &names)?;
            let clusters = cluster_for_seed(&emb, labels.k(), cfg.seed)?;
            let acc = accuracy(&clusters, &labels)?;
            if let Some(path) = assignments {
                write_assignments(&graph, &clusters, BufWriter::new(fs::File::create(path)?))?;
            }
            println!(
                "dataset={} task=cd metric=acc value={acc:.6} seed={}",
                cfg.dataset_id(),
                cfg.seed
            );
        }
        Command::EvalLp {
            target,
            test_fraction,
            tie_half_credit,
        } => {
            let cfg = target.config(Task::Lp);
            let graph = load_graph(&cfg)?;
            let split = split_for_seed(&graph, test_fraction, cfg.seed)?;
            let (emb, names) = load_embeddings(&target.embeddings)?;
            let emb = align_embeddings(&graph, &emb, &names)?;
            let score = |pairs: &[(usize, usize)]| -> Vec<f64> {
                pairs.iter().map(|&(u, v)| link_score(&emb, u, v)).collect()
            };
            let ties = if tie_half_credit {
                TieRule::HalfCredit
            } else {
                TieRule::Strict
            };
            let value = auc(&score(&split.pos_test), &score(&split.neg_test), ties)?;
            println!(
                "dataset={} task=lp metric=auc value={value:.6} seed={}",
                cfg.dataset_id(),
                cfg.seed
            );
        }
        Command::Ablate { grid, out } => {
            let text =
                fs::read_to_string(&grid).with_context(|| format!("reading {}", grid.display()))?;
            let (grid, rest) = AblationGrid::from_map(&parse_kv(&text)?)?;
            let base = RunConfig::from_map(&rest)?;
            let report = ablate(&base, &grid)?;
            match out {
                Some(path) => report.write_csv(fs::File::create(path)?)?,
                None => report.write_csv(io::stdout().lock())?,
            }
            if report.rows.iter().any(|r| r.metric.starts_with("error")) {
                bail!("some grid runs failed; see the error rows in the CSV");
            }
        }
    }
    io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let reason = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {reason}");
            ExitCode::FAILURE
        }
    }
}
