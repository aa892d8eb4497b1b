use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Why a search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HaltReason {
    /// A point reached the perfect score.
    Perfect,
    /// The completed-evaluation budget was spent.
    Limit,
    /// No new global best within the stagnation window.
    Stagnation,
    /// Nothing left to evaluate.
    Exhausted,
    /// Coordinate descent found no improving move.
    Converged,
}

impl std::fmt::Display for HaltReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HaltReason::Perfect => "perfect",
            HaltReason::Limit => "limit",
            HaltReason::Stagnation => "stagnation",
            HaltReason::Exhausted => "exhausted",
            HaltReason::Converged => "converged",
        })
    }
}

/// Halting criteria, checked after every completed evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaltSpec {
    /// Stop once this many evaluations have completed.
    pub max_points: Option<usize>,
    /// Stop after this many completed evaluations without a new global best.
    pub stagnation_window: Option<usize>,
    /// Stop as soon as a score reaches this value.
    pub perfect_score: f64,
}

impl Default for HaltSpec {
    fn default() -> Self {
        Self {
            max_points: None,
            stagnation_window: None,
            perfect_score: 1.0,
        }
    }
}

impl HaltSpec {
    pub fn max_points(n: usize) -> Self {
        Self {
            max_points: Some(n),
            ..Self::default()
        }
    }

    pub fn stagnation(window: usize) -> Self {
        Self {
            stagnation_window: Some(window),
            ..Self::default()
        }
    }

    /// Open-ended searches (priority queue and bandit) need a budget or a
    /// stagnation window to terminate on an unbounded grid.
    pub fn validate_bounded(&self) -> Result<()> {
        if self.max_points == Some(0) || self.stagnation_window == Some(0) {
            return Err(Error::Config("halt limits must be positive".into()));
        }
        if self.max_points.is_none() && self.stagnation_window.is_none() {
            return Err(Error::Config(
                "parallel searches need max_points or a stagnation window".into(),
            ));
        }
        Ok(())
    }
}

/// Incremental evaluation of a [`HaltSpec`] over a stream of completed
/// evaluations.
///
/// Starting points are evaluated as one initial batch: they count toward
/// `max_points` but never advance the stagnation counter, so the window
/// measures evaluations made after the search has left its starting set.
#[derive(Debug, Clone)]
pub struct HaltTracker {
    spec: HaltSpec,
    completed: usize,
    since_improvement: usize,
    best: Option<f64>,
    fired: Option<HaltReason>,
}

impl HaltTracker {
    pub fn new(spec: HaltSpec) -> Self {
        Self {
            spec,
            completed: 0,
            since_improvement: 0,
            best: None,
            fired: None,
        }
    }

    /// Feeds one completed evaluation and returns the halt decision, which
    /// never reverts once made.
    pub fn observe(&mut self, score: f64, starting_point: bool) -> Option<HaltReason> {
        self.completed += 1;
        let improved = self.best.is_none_or(|b| score > b);
        if improved {
            self.best = Some(score);
            self.since_improvement = 0;
        } else if !starting_point {
            self.since_improvement += 1;
        }
        if self.fired.is_none() {
            self.fired = if score >= self.spec.perfect_score {
                Some(HaltReason::Perfect)
            } else if self.spec.max_points.is_some_and(|m| self.completed >= m) {
                Some(HaltReason::Limit)
            } else if self
                .spec
                .stagnation_window
                .is_some_and(|w| self.since_improvement >= w)
            {
                Some(HaltReason::Stagnation)
            } else {
                None
            };
        }
        self.fired
    }

    pub fn fired(&self) -> Option<HaltReason> {
        self.fired
    }

    pub fn completed(&self) -> usize {
        self.completed
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    pub fn spec(&self) -> &HaltSpec {
        &self.spec
    }
}
