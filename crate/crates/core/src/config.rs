//! Run configuration and its flat `key=value` text form.
//!
//! Keys use the same spelling as the CLI flags (`lr-start`, `test-fraction`, ...), so a
//! config file and command-line overrides merge key by key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::skipgram::TrainConfig;
use crate::walk::{AnnealSchedule, LikelihoodKind, Node2vecParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
    #[error("invalid value '{value}' for '{key}': {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("'{key}' only applies to method {applies_to}")]
    WrongMethod {
        key: &'static str,
        applies_to: &'static str,
    },
}

pub type ConfigMap = BTreeMap<String, String>;

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<ConfigMap, ConfigError> {
    let mut map = ConfigMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        map.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

pub fn format_kv(map: &ConfigMap) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Community detection.
    Cd,
    /// Link prediction.
    Lp,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Cd => "cd",
            Task::Lp => "lp",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cd" => Ok(Task::Cd),
            "lp" => Ok(Task::Lp),
            other => Err(format!("unknown task '{other}' (expected cd or lp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    DeepWalk,
    /// `p`/`q` fall back to task-specific defaults when unset.
    Node2vec {
        p: Option<f64>,
        q: Option<f64>,
    },
    GlobalWalk {
        likelihood: LikelihoodKind,
        beta: f64,
    },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::DeepWalk => "deepwalk",
            Method::Node2vec { .. } => "node2vec",
            Method::GlobalWalk { .. } => "globalwalk",
        }
    }

    /// Node2vec parameters with task defaults: `p=2, q=0.5` for community detection,
    /// `p=0.5, q=2` for link prediction.
    pub fn node2vec_params(&self, task: Task) -> Option<Node2vecParams> {
        let Method::Node2vec { p, q } = *self else {
            return None;
        };
        let (dp, dq) = match task {
            Task::Cd => (2.0, 0.5),
            Task::Lp => (0.5, 2.0),
        };
        Some(Node2vecParams {
            p: p.unwrap_or(dp),
            q: q.unwrap_or(dq),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub edges: PathBuf,
    pub labels: Option<PathBuf>,
    pub directed: bool,
    /// Mirror every arc after loading a directed file.
    pub symmetrize: bool,
    pub method: Method,
    pub task: Task,
    /// Walks per node per epoch (`r`).
    pub walks: usize,
    /// Maximum walk length (`l`).
    pub length: usize,
    pub dim: usize,
    pub epochs: usize,
    pub train: TrainConfig,
    pub test_fraction: f64,
    pub seed: u64,
    pub deterministic: bool,
    /// Dataset id for reports; defaults to the edge file's stem.
    pub dataset: Option<String>,
}

impl RunConfig {
    pub fn new(edges: impl Into<PathBuf>, method: Method, task: Task) -> Self {
        RunConfig {
            edges: edges.into(),
            labels: None,
            directed: false,
            symmetrize: false,
            method,
            task,
            walks: 10,
            length: 80,
            dim: 64,
            epochs: 3,
            train: TrainConfig::default(),
            test_fraction: 0.2,
            seed: 0,
            deterministic: false,
            dataset: None,
        }
    }

    pub fn dataset_id(&self) -> String {
        self.dataset.clone().unwrap_or_else(|| {
            self.edges
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: usize| {
            if v == 0 {
                Err(ConfigError::Invalid {
                    key: key.into(),
                    value: "0".into(),
                    reason: "must be at least 1".into(),
                })
            } else {
                Ok(())
            }
        };
        positive("epochs", self.epochs)?;
        positive("walks", self.walks)?;
        positive("length", self.length)?;
        positive("dim", self.dim)?;
        self.train.validate().map_err(|e| ConfigError::Invalid {
            key: "train".into(),
            value: format!("{:?}", self.train),
            reason: e.to_string(),
        })?;
        if let Some(params) = self.method.node2vec_params(self.task) {
            params.validate().map_err(|e| ConfigError::Invalid {
                key: "p/q".into(),
                value: format!("{}/{}", params.p, params.q),
                reason: e.to_string(),
            })?;
        }
        if let Method::GlobalWalk { beta, .. } = self.method {
            AnnealSchedule::new(beta)
                .validate()
                .map_err(|e| ConfigError::Invalid {
                    key: "beta".into(),
                    value: beta.to_string(),
                    reason: e.to_string(),
                })?;
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(ConfigError::Invalid {
                key: "test-fraction".into(),
                value: self.test_fraction.to_string(),
                reason: "must lie in (0, 1)".into(),
            });
        }
        Ok(())
    }

    pub fn to_map(&self) -> ConfigMap {
        let mut m = ConfigMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_owned(), v);
        };
        put("edges", self.edges.display().to_string());
        if let Some(labels) = &self.labels {
            put("labels", labels.display().to_string());
        }
        put("directed", self.directed.to_string());
        put("symmetrize", self.symmetrize.to_string());
        put("method", self.method.name().into());
        match self.method {
            Method::DeepWalk => {}
            Method::Node2vec { p, q } => {
                if let Some(p) = p {
                    put("p", p.to_string());
                }
                if let Some(q) = q {
                    put("q", q.to_string());
                }
            }
            Method::GlobalWalk { likelihood, beta } => {
                put("likelihood", likelihood.to_string());
                put("beta", beta.to_string());
            }
        }
        put("task", self.task.to_string());
        put("walks", self.walks.to_string());
        put("length", self.length.to_string());
        put("window", self.train.window.to_string());
        put("dim", self.dim.to_string());
        put("epochs", self.epochs.to_string());
        put("negatives", self.train.negatives.to_string());
        put("lr-start", self.train.lr_start.to_string());
        put("lr-end", self.train.lr_end.to_string());
        put("noise-power", self.train.noise_power.to_string());
        put("test-fraction", self.test_fraction.to_string());
        put("seed", self.seed.to_string());
        put("deterministic", self.deterministic.to_string());
        if let Some(d) = &self.dataset {
            put("dataset", d.clone());
        }
        m
    }

    pub fn to_kv(&self) -> String {
        format_kv(&self.to_map())
    }

    /// Builds a config from a key map. Unset keys take their defaults; `edges`, `method`
    /// and `task` are required.
    pub fn from_map(map: &ConfigMap) -> Result<Self, ConfigError> {
        const KNOWN: [&str; 23] = [
            "edges",
            "labels",
            "directed",
            "symmetrize",
            "method",
            "likelihood",
            "beta",
            "p",
            "q",
            "task",
            "walks",
            "length",
            "window",
            "dim",
            "epochs",
            "negatives",
            "lr-start",
            "lr-end",
            "noise-power",
            "test-fraction",
            "seed",
            "deterministic",
            "dataset",
        ];
        if let Some(k) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        fn parse<T: FromStr>(map: &ConfigMap, key: &str) -> Result<Option<T>, ConfigError>
        where
            T::Err: fmt::Display,
        {
            map.get(key)
                .map(|v| {
                    v.parse::<T>().map_err(|e| ConfigError::Invalid {
                        key: key.into(),
                        value: v.clone(),
                        reason: e.to_string(),
                    })
                })
                .transpose()
        }

        let edges: PathBuf = parse(map, "edges")?.ok_or(ConfigError::Missing("edges"))?;
        let task: Task = parse(map, "task")?.ok_or(ConfigError::Missing("task"))?;
        let method_name: String = parse(map, "method")?.ok_or(ConfigError::Missing("method"))?;
        let likelihood: Option<LikelihoodKind> = parse(map, "likelihood")?;
        let beta: Option<f64> = parse(map, "beta")?;
        let p: Option<f64> = parse(map, "p")?;
        let q: Option<f64> = parse(map, "q")?;
        let method = match method_name.as_str() {
            "deepwalk" => Method::DeepWalk,
            "node2vec" => Method::Node2vec { p, q },
            "globalwalk" => Method::GlobalWalk {
                likelihood: likelihood.unwrap_or(LikelihoodKind::Exp),
                beta: beta.unwrap_or(0.2),
            },
            other => {
                return Err(ConfigError::Invalid {
                    key: "method".into(),
                    value: other.into(),
                    reason: "expected deepwalk, node2vec or globalwalk".into(),
                })
            }
        };
        if !matches!(method, Method::GlobalWalk { .. }) {
            if likelihood.is_some() {
                return Err(ConfigError::WrongMethod {
                    key: "likelihood",
                    applies_to: "globalwalk",
                });
            }
            if beta.is_some() {
                return Err(ConfigError::WrongMethod {
                    key: "beta",
                    applies_to: "globalwalk",
                });
            }
        }
        if !matches!(method, Method::Node2vec { .. }) && (p.is_some() || q.is_some()) {
            return Err(ConfigError::WrongMethod {
                key: "p/q",
                applies_to: "node2vec",
            });
        }

        let mut cfg = RunConfig::new(edges, method, task);
        cfg.labels = parse(map, "labels")?;
        macro_rules! set {
            ($field:expr, $key:literal) => {
                if let Some(v) = parse(map, $key)? {
                    $field = v;
                }
            };
        }
        set!(cfg.directed, "directed");
        set!(cfg.symmetrize, "symmetrize");
        set!(cfg.walks, "walks");
        set!(cfg.length, "length");
        set!(cfg.train.window, "window");
        set!(cfg.dim, "dim");
        set!(cfg.epochs, "epochs");
        set!(cfg.train.negatives, "negatives");
        set!(cfg.train.lr_start, "lr-start");
        set!(cfg.train.lr_end, "lr-end");
        set!(cfg.train.noise_power, "noise-power");
        set!(cfg.test_fraction, "test-fraction");
        set!(cfg.seed, "seed");
        set!(cfg.deterministic, "deterministic");
        cfg.dataset = parse(map, "dataset")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        Self::from_map(&parse_kv(text)?)
    }
}
