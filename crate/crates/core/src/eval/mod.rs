//! Community detection and link prediction evaluation.

mod accuracy;
mod kmeans;
mod link;
mod report;

pub use accuracy::{accuracy, max_weight_matching};
pub use kmeans::{kmeans, kmeans_points, ClusterAssignment, KMeansParams};
pub use link::{auc, link_score, split_edges, LinkSplit, TieRule};
pub use report::{write_assignments, EvalReport, REPORT_COLUMNS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("k = {k} exceeds the number of points ({points})")]
    TooManyClusters { k: usize, points: usize },
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("cluster count {clusters} does not match label count {labels}")]
    ClusterCountMismatch { clusters: usize, labels: usize },
    #[error("assignment covers {assigned} nodes but labels cover {labeled}")]
    SizeMismatch { assigned: usize, labeled: usize },
    #[error("node {0} is clustered but has no label")]
    Unlabeled(usize),
    #[error("test fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("graph too dense: found only {found} of {wanted} non-edges after {attempts} attempts")]
    TooDense {
        found: usize,
        wanted: usize,
        attempts: usize,
    },
    #[error("score list is empty")]
    EmptyScores,
    #[error("score is NaN")]
    NanScore,
}
