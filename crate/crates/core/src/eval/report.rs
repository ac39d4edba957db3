use std::collections::BTreeMap;
use std::io::Write;

use crate::graph::Graph;

use super::ClusterAssignment;

/// CSV columns of a report row.
pub const REPORT_COLUMNS: [&str; 9] = [
    "dataset",
    "task",
    "method",
    "likelihood",
    "beta",
    "seed",
    "metric",
    "value",
    "seconds",
];

/// One metric from one run, with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub dataset: String,
    pub task: String,
    pub method: String,
    /// `"-"` for methods without a likelihood.
    pub likelihood: String,
    pub beta: Option<f64>,
    pub seed: String,
    pub metric: String,
    pub value: f64,
    pub seconds: f64,
    pub hyperparameters: BTreeMap<String, String>,
}

impl EvalReport {
    fn beta_field(&self) -> String {
        self.beta.map_or_else(|| "-".to_owned(), |b| b.to_string())
    }

    pub fn csv_fields(&self) -> [String; 9] {
        [
            self.dataset.clone(),
            self.task.clone(),
            self.method.clone(),
            self.likelihood.clone(),
            self.beta_field(),
            self.seed.clone(),
            self.metric.clone(),
            format!("{:.6}", self.value),
            format!("{:.3}", self.seconds),
        ]
    }

    /// Single-line `key=value` record; hyperparameters follow the fixed columns.
    pub fn to_kv_line(&self) -> String {
        let fixed = REPORT_COLUMNS
            .iter()
            .zip(self.csv_fields())
            .map(|(k, v)| format!("{k}={v}"));
        let extra = self.hyperparameters.iter().map(|(k, v)| format!("{k}={v}"));
        fixed.chain(extra).collect::<Vec<_>>().join(" ")
    }

    /// Header plus one row.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(REPORT_COLUMNS)?;
        writer.write_record(self.csv_fields())?;
        writer.flush()?;
        Ok(())
    }
}

/// `node_id,cluster_id` rows using external node names.
pub fn write_assignments<W: Write>(
    graph: &Graph,
    clusters: &ClusterAssignment,
    out: W,
) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["node_id", "cluster_id"])?;
    for (u, c) in clusters.assignment.iter().enumerate() {
        writer.write_record([graph.name(u), &c.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
