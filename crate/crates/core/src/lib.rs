//! Unsupervised label-noise ranking for labeled embedding datasets.
//!
//! The pipeline:
//!
//! 1. load an embedding matrix with given labels ([`dataset`]),
//! 2. pick per-class prototypes with K-means ([`prototypes`]),
//! 3. predict each prototype's label from a kernel-weighted kNN vote and
//!    score every voter with a blame/reward weight ([`ranking`]),
//! 4. rank instances by score and drop those above a threshold.
//!
//! [`eval`] generates synthetic data with injected noise and measures
//! detection quality; [`sweep`] runs the two-stage hyperparameter search.
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod neighbors;
pub mod prototypes;
pub mod ranking;
pub mod sweep;

pub use dataset::{load_dataset, EmbeddingDataset};
pub use error::{Error, Result};
pub use neighbors::{distance, kernel, knn, Kernel, KernelParams, NeighborList};
pub use prototypes::{prototype_count, select_prototypes, PrototypePolicy, PrototypeSet};
pub use ranking::{
    classify_clique, clique_weight, denoise, explain, predict_label, score_all, CliqueScope,
    CliqueType, RankParams, ScoreTable,
};
