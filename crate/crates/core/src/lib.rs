//! Node embeddings from random-walk corpora.
//!
//! Three walkers feed a Skip-Gram trainer: uniform walks, second-order node2vec walks, and
//! an annealed walker that biases transitions toward neighbors whose current embeddings are
//! close. Evaluation covers community detection (K-Means + best-matching accuracy) and link
//! prediction (held-out edges + AUC).

pub mod config;
pub mod embed;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod rng;
pub mod skipgram;
pub mod walk;

pub use config::{Method, RunConfig, Task};
pub use embed::EmbeddingMatrix;
pub use graph::{Graph, LabelMap};
pub use walk::{Corpus, LikelihoodKind, WalkPolicy};
