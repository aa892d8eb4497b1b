use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// How objects are distributed over folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldStrategy {
    /// Per-class round robin; per-class fold sizes differ by at most one.
    #[default]
    Stratified,
    /// Shuffle everything and deal round robin, ignoring classes.
    Plain,
}

/// Assignment of every object to exactly one of `fold_count` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    fold_count: usize,
    assignments: Vec<usize>,
}

impl FoldSplit {
    pub fn new(fold_count: usize, assignments: Vec<usize>) -> Result<Self> {
        if fold_count < 2 {
            return Err(Error::InvalidFoldCount(fold_count));
        }
        if let Some(&bad) = assignments.iter().find(|&&f| f >= fold_count) {
            return Err(Error::Config(format!(
                "fold id {bad} out of range for {fold_count} folds"
            )));
        }
        Ok(Self {
            fold_count,
            assignments,
        })
    }

    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified `k`-fold assignment, deterministic for a fixed seed.
///
/// When the smallest class has fewer than `k` objects, `k` is clamped to that
/// size and a warning is logged.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<FoldSplit> {
    make_folds(ds, k, seed, FoldStrategy::Stratified)
}

pub fn make_folds(ds: &Dataset, k: usize, seed: u64, strategy: FoldStrategy) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ds.object_count();
    let mut assignments = vec![0usize; n];
    match strategy {
        FoldStrategy::Stratified => {
            let smallest = ds.class_sizes().into_iter().min().unwrap_or(0);
            let k = if smallest < k {
                log::warn!(
                    "{}: smallest class has {smallest} objects, clamping {k} folds to {smallest}",
                    ds.name()
                );
                smallest
            } else {
                k
            };
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.class_count()];
            for (i, &y) in ds.labels().iter().enumerate() {
                by_class[y].push(i);
            }
            // carry the offset across classes so total fold sizes stay balanced
            let mut offset = 0;
            for members in &mut by_class {
                members.shuffle(&mut rng);
                for (pos, &i) in members.iter().enumerate() {
                    assignments[i] = (offset + pos) % k;
                }
                offset = (offset + members.len()) % k;
            }
            FoldSplit::new(k, assignments)
        }
        FoldStrategy::Plain => {
            let k = k.min(n);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for (pos, &i) in order.iter().enumerate() {
                assignments[i] = pos % k;
            }
            FoldSplit::new(k, assignments)
        }
    }
}
