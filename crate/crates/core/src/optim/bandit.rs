//! UCB1 arm selection over search-space partitions.

use serde::{Deserialize, Serialize};

use super::queue::PointQueue;
use crate::error::{Error, Result};

/// One arm: a partition of the search space with its own queue of pending
/// points and the rewards of its completed evaluations.
#[derive(Debug, Clone, Default)]
pub struct ArmState {
    pub id: usize,
    pub queue: PointQueue,
    rewards: Vec<f64>,
    reward_sum: f64,
}

/// Summary of an arm after a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub id: usize,
    pub pulls: usize,
    pub mean_reward: f64,
}

impl ArmState {
    pub fn new(id: usize) -> Self {
        Self {
            id,
            ..Self::default()
        }
    }

    /// Completed pulls `n_i`.
    pub fn pulls(&self) -> usize {
        self.rewards.len()
    }

    /// Mean completed reward `x̄_i`, zero before the first pull.
    pub fn mean(&self) -> f64 {
        if self.rewards.is_empty() {
            0.0
        } else {
            self.reward_sum / self.rewards.len() as f64
        }
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn record(&mut self, reward: f64) {
        self.rewards.push(reward);
        self.reward_sum += reward;
    }

    pub fn summary(&self) -> ArmSummary {
        ArmSummary {
            id: self.id,
            pulls: self.pulls(),
            mean_reward: self.mean(),
        }
    }
}

/// UCB1 choice among arms whose queues are non-empty.
///
/// An eligible arm that has never completed a pull wins outright (lowest id
/// first). Otherwise the arm maximizing `x̄_i + C·sqrt(2·ln n / n_i)` is
/// chosen, ties going to the lowest id, where `n` is the total number of
/// completed pulls. Only completed results enter the statistics, so pulls
/// still in flight on other workers are invisible here.
pub fn ucb_select(arms: &[ArmState], exploration: f64) -> Result<usize> {
    let eligible = || arms.iter().filter(|a| !a.queue.is_empty());
    if let Some(cold) = eligible().find(|a| a.pulls() == 0) {
        return Ok(cold.id);
    }
    let total: usize = arms.iter().map(ArmState::pulls).sum();
    let ln_n = (total as f64).ln();
    let mut best: Option<(f64, usize)> = None;
    for arm in eligible() {
        let score = arm.mean() + exploration * (2.0 * ln_n / arm.pulls() as f64).sqrt();
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, arm.id));
        }
    }
    best.map(|(_, id)| id)
        .ok_or_else(|| Error::Config("no arm has pending points".into()))
}
