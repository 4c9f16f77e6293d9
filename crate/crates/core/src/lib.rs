//! Analogy-based software effort estimation (ABE) with per-feature similarity
//! weights tuned by a firefly algorithm (FAABE).
//!
//! The modules follow the pipeline order:
//!
//! * [`dataset`]: CSV + manifest ingestion, descriptive statistics, min-max normalization.
//! * [`select`]: Pearson-correlation feature filter.
//! * [`abe`]: weighted similarity, analogy retrieval, solution functions.
//! * [`firefly`]: the weight optimizer and its training objective.
//! * [`metrics`]: MMRE/MAE/MSE/RMSE and the basic/train/test split.
//! * [`experiment`]: baseline vs optimized runs, suites and result artifacts.

pub mod abe;
pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod firefly;
pub mod metrics;
pub mod report;
pub mod select;
pub mod selftest;
pub mod stats;

pub use abe::{AbeConfig, SimilarityKind, SolutionKind, WeightVector};
pub use dataset::{Dataset, FeatureKind, FeatureValue, Project};
pub use error::{Error, Result};
pub use firefly::FaConfig;
pub use metrics::MetricsReport;
