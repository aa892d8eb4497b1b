//! Feature selection by searching for the best linear combination of
//! ranking-filter importance measures.
//!
//! A [`FilterEnsemble`] holds `N` normalized importance measures for one
//! dataset. Each point of the `δ`-grid over `ℝ^N` is a weight vector; the
//! weighted sum of measures ranks the features, the top `m` are kept, and a
//! cross-validated classifier turns that subset into a macro-F1 score. The
//! [`optim`] module searches the grid with sequential coordinate descent
//! (MeLiF and its naive parallel form MeLiF+), parallel best-first search over
//! a priority queue (PQMeLiF), and parallel UCB1-guided search over
//! search-space partitions (MAMeLiF).
//!
//! [`bench`] runs the ten standard configurations over a set of datasets and
//! produces a time/F1 comparison table.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod evaluator;
pub mod filters;
pub mod optim;

pub use dataset::{Dataset, FoldSplit, FoldStrategy, LabelColumn};
pub use error::{Error, Result};
pub use evaluator::{
    CvObjective, EvalConfig, EvalRecord, EvalService, GridPoint, GridSpacing, Objective,
    StubObjective,
};
pub use filters::{CuttingRule, FilterEnsemble, ImportanceVector, Measure};
pub use optim::{HaltReason, HaltSpec, OptimizerConfig, OptimizerKind, SearchResult};
