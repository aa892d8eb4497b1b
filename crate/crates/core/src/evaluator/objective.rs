use std::time::Duration;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::{Classifier, ClassifierKind};
use super::metrics::Metric;
use crate::dataset::{make_folds, Dataset, FoldSplit, FoldStrategy};
use crate::error::{Error, Result};
use crate::filters::{cut_top_m, CuttingRule, FilterEnsemble};

/// Score of one weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub score: f64,
    pub selected_features: Vec<usize>,
}

/// A (possibly expensive) function from filter weights to a quality score.
pub trait Objective: Send + Sync {
    /// Number of weights expected by [`Objective::evaluate`].
    fn dim(&self) -> usize;

    fn evaluate(&self, weights: &[f64]) -> Result<Outcome>;
}

/// Settings for cross-validated point evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Number of top-ranked features kept.
    pub m: usize,
    pub folds: usize,
    pub fold_strategy: FoldStrategy,
    pub classifier: ClassifierKind,
    pub metric: Metric,
    /// Seed for the fold assignment.
    pub seed: u64,
    /// Train and score the folds of one evaluation concurrently.
    pub parallel_folds: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            m: 100,
            folds: 5,
            fold_strategy: FoldStrategy::Stratified,
            classifier: ClassifierKind::NearestCentroid,
            metric: Metric::Macro,
            seed: 0,
            parallel_folds: false,
        }
    }
}

/// Combines the ensemble under the given weights, keeps the top `m`
/// features, and returns the fold-mean classification score.
pub struct CvObjective<'a> {
    dataset: &'a Dataset,
    ensemble: &'a FilterEnsemble,
    rule: CuttingRule,
    metric: Metric,
    classifier: Box<dyn Classifier>,
    folds: Vec<(Vec<usize>, Vec<usize>)>,
    parallel_folds: bool,
}

impl<'a> CvObjective<'a> {
    pub fn new(dataset: &'a Dataset, ensemble: &'a FilterEnsemble, cfg: &EvalConfig) -> Result<Self> {
        let split = make_folds(dataset, cfg.folds, cfg.seed, cfg.fold_strategy)?;
        Self::with_split(dataset, ensemble, cfg, &split)
    }

    pub fn with_split(
        dataset: &'a Dataset,
        ensemble: &'a FilterEnsemble,
        cfg: &EvalConfig,
        split: &FoldSplit,
    ) -> Result<Self> {
        if ensemble.feature_count() != dataset.feature_count() {
            return Err(Error::DimensionMismatch {
                expected: dataset.feature_count(),
                actual: ensemble.feature_count(),
            });
        }
        if split.assignments().len() != dataset.object_count() {
            return Err(Error::DimensionMismatch {
                expected: dataset.object_count(),
                actual: split.assignments().len(),
            });
        }
        let folds = (0..split.fold_count())
            .map(|f| (split.train_indices(f), split.test_indices(f)))
            .collect();
        Ok(Self {
            dataset,
            ensemble,
            rule: CuttingRule::new(cfg.m)?,
            metric: cfg.metric,
            classifier: cfg.classifier.build(),
            folds,
            parallel_folds: cfg.parallel_folds,
        })
    }

    /// Fold-mean score of the feature subset `selected`.
    pub fn score_subset(&self, selected: &[usize]) -> Result<f64> {
        let sub = self.dataset.features().select(Axis(1), selected);
        let labels = self.dataset.labels();
        let run_fold = |(fold, (train, test)): (usize, &(Vec<usize>, Vec<usize>))| -> Result<f64> {
            if test.is_empty() || train.is_empty() {
                return Err(Error::DegenerateFold {
                    fold,
                    message: format!("{} training and {} test objects", train.len(), test.len()),
                });
            }
            let x_train: Array2<f64> = sub.select(Axis(0), train);
            let y_train: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let x_test: Array2<f64> = sub.select(Axis(0), test);
            let y_test: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            let model = self.classifier.fit(x_train.view(), &y_train)?;
            self.metric.score(&y_test, &model.predict(x_test.view()))
        };
        let scores: Vec<f64> = if self.parallel_folds {
            self.folds.par_iter().enumerate().map(run_fold).collect::<Result<_>>()?
        } else {
            self.folds.iter().enumerate().map(run_fold).collect::<Result<_>>()?
        };
        Ok(scores.iter().sum::<f64>() / scores.len() as f64)
    }

    /// Features selected for the given weights.
    pub fn select(&self, weights: &[f64]) -> Result<Vec<usize>> {
        Ok(cut_top_m(&self.ensemble.combine(weights)?, self.rule))
    }
}

impl Objective for CvObjective<'_> {
    fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    fn evaluate(&self, weights: &[f64]) -> Result<Outcome> {
        let selected = self.select(weights)?;
        let score = self.score_subset(&selected)?;
        Ok(Outcome {
            score,
            selected_features: selected,
        })
    }
}

/// A closed-form objective, optionally sleeping to simulate an expensive
/// evaluation. Used to exercise the schedulers without any dataset.
pub struct StubObjective<F> {
    dim: usize,
    f: F,
    sleep: Option<Duration>,
}

impl<F> StubObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, sleep: None }
    }

    pub fn with_sleep(mut self, sleep: Duration) -> Self {
        self.sleep = Some(sleep);
        self
    }
}

impl<F> Objective for StubObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, weights: &[f64]) -> Result<Outcome> {
        if let Some(d) = self.sleep {
            std::thread::sleep(d);
        }
        let score = (self.f)(weights);
        if !score.is_finite() {
            return Err(Error::Config(format!("stub objective returned {score}")));
        }
        Ok(Outcome {
            score,
            selected_features: Vec::new(),
        })
    }
}
