//! Search over the `δ`-grid of filter weights.
//!
//! * [`melif_descent`]: sequential coordinate descent (MeLiF).
//! * [`melif_plus`]: one descent per starting point on its own worker (MeLiF+).
//! * [`pq_melif`]: parallel best-first search over one priority queue (PQMeLiF).
//! * [`ma_melif`]: parallel search over per-start queues chosen by UCB1 (MAMeLiF).
//!
//! All optimizers share one [`EvalService`], so each grid point is evaluated
//! at most once per run.

mod bandit;
mod descent;
mod halt;
mod parallel;
mod queue;

pub use bandit::{ucb_select, ArmState, ArmSummary};
pub use descent::{melif_descent, melif_plus};
pub use halt::{HaltReason, HaltSpec, HaltTracker};
pub use parallel::{ma_melif, pq_melif};
pub use queue::PointQueue;

use std::collections::HashSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{EvalRecord, EvalService, GridPoint, GridSpacing, Lookup, Objective};

/// The four search strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OptimizerKind {
    #[serde(rename = "melif")]
    Melif,
    #[serde(rename = "melif+")]
    MelifPlus,
    #[serde(rename = "pq")]
    PriorityQueue,
    #[serde(rename = "ma")]
    Bandit,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Melif => "melif",
            OptimizerKind::MelifPlus => "melif+",
            OptimizerKind::PriorityQueue => "pq",
            OptimizerKind::Bandit => "ma",
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "melif" | "b" => Ok(OptimizerKind::Melif),
            "melif+" | "melifplus" | "p" => Ok(OptimizerKind::MelifPlus),
            "pq" | "pqmelif" => Ok(OptimizerKind::PriorityQueue),
            "ma" | "mamelif" => Ok(OptimizerKind::Bandit),
            _ => Err(Error::Unknown {
                kind: "optimizer",
                name: s.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters shared by every optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub spacing: GridSpacing,
    pub starting_points: Vec<GridPoint>,
    pub threads: usize,
    pub halt: HaltSpec,
    pub seed: u64,
    /// UCB1 exploration coefficient `C`.
    pub exploration: f64,
}

impl OptimizerConfig {
    /// Defaults for a `dim`-dimensional weight space: `δ = 0.25`, the unit
    /// vectors plus the all-ones vector as starts, one worker per core, and
    /// only the perfect-score halt.
    pub fn new(dim: usize) -> Self {
        let spacing = GridSpacing::default();
        Self {
            spacing,
            starting_points: default_starting_points(dim, spacing),
            threads: default_threads(),
            halt: HaltSpec::default(),
            seed: 0,
            exploration: 1.0,
        }
    }

    pub fn with_spacing(mut self, spacing: GridSpacing) -> Self {
        let dim = self.starting_points.first().map_or(0, GridPoint::dim);
        self.spacing = spacing;
        self.starting_points = default_starting_points(dim, spacing);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_halt(mut self, halt: HaltSpec) -> Self {
        self.halt = halt;
        self
    }

    pub fn with_starting_points(mut self, points: Vec<GridPoint>) -> Self {
        self.starting_points = points;
        self
    }

    pub(crate) fn validate<O: Objective>(&self, service: &EvalService<O>) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("at least one worker thread is required".into()));
        }
        if self.spacing != service.spacing() {
            return Err(Error::Config(format!(
                "optimizer grid spacing {} differs from the evaluator's {}",
                self.spacing.delta(),
                service.spacing().delta()
            )));
        }
        if self.starting_points.is_empty() {
            return Err(Error::Config("no starting points".into()));
        }
        let mut seen = HashSet::new();
        for p in &self.starting_points {
            if p.dim() != service.dim() {
                return Err(Error::DimensionMismatch {
                    expected: service.dim(),
                    actual: p.dim(),
                });
            }
            if !seen.insert(p) {
                return Err(Error::Config(format!("duplicate starting point {p}")));
            }
        }
        if !(self.exploration.is_finite() && self.exploration >= 0.0) {
            return Err(Error::Config(format!(
                "exploration coefficient must be non-negative, got {}",
                self.exploration
            )));
        }
        Ok(())
    }
}

/// Worker count when none is given: the available parallelism.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// The `dim` unit vectors followed by the all-ones vector (which coincides
/// with the single unit vector when `dim == 1`).
pub fn default_starting_points(dim: usize, spacing: GridSpacing) -> Vec<GridPoint> {
    let mut points: Vec<GridPoint> = (0..dim).map(|k| GridPoint::unit(dim, k, spacing)).collect();
    if dim > 1 {
        points.push(GridPoint::ones(dim, spacing));
    }
    points
}

/// The `2N` axis neighbours of `p`: dimension 0 plus, dimension 0 minus,
/// dimension 1 plus, and so on. The grid is unbounded.
pub fn neighbors(p: &GridPoint) -> Vec<GridPoint> {
    (0..p.dim())
        .flat_map(|d| [p.shifted(d, 1), p.shifted(d, -1)])
        .collect()
}

/// One point visited by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    #[serde(flatten)]
    pub record: EvalRecord,
    /// Bandit arm that owned the point, for [`ma_melif`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arm: Option<usize>,
    /// `false` when the score came from an earlier run's cache entry.
    pub fresh: bool,
}

/// Output of every optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub optimizer: OptimizerKind,
    pub best_point: GridPoint,
    pub best_weights: Vec<f64>,
    pub best_score: f64,
    pub best_features: Vec<usize>,
    /// Visited points in completion order.
    pub visits: Vec<Visit>,
    pub wall_nanos: u64,
    pub halt_reason: HaltReason,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arms: Vec<ArmSummary>,
}

impl SearchResult {
    /// Number of evaluations this run actually computed.
    pub fn points_evaluated(&self) -> usize {
        self.visits.iter().filter(|v| v.fresh).count()
    }

    pub fn records(&self) -> impl Iterator<Item = &EvalRecord> {
        self.visits.iter().map(|v| &v.record)
    }

    /// Writes one JSON object per visit: `{seq, coords, score, wall_nanos, arm?}`,
    /// where `coords` are the real-valued weights.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            seq: u64,
            coords: &'a [f64],
            score: f64,
            wall_nanos: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            arm: Option<usize>,
        }
        for v in &self.visits {
            let line = Line {
                seq: v.record.seq,
                coords: &v.record.weights,
                score: v.record.score,
                wall_nanos: v.record.wall_nanos,
                arm: v.arm,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")
                .map_err(|e| Error::Serialization(e.to_string()))?;
        }
        Ok(())
    }
}

/// Runs the chosen optimizer.
pub fn run<O: Objective>(
    kind: OptimizerKind,
    service: &EvalService<O>,
    cfg: &OptimizerConfig,
) -> Result<SearchResult> {
    match kind {
        OptimizerKind::Melif => melif_descent(service, cfg),
        OptimizerKind::MelifPlus => melif_plus(service, cfg),
        OptimizerKind::PriorityQueue => pq_melif(service, cfg),
        OptimizerKind::Bandit => ma_melif(service, cfg),
    }
}

/// Accumulates the visits of one run and drives its halt tracker.
#[derive(Debug)]
pub(crate) struct RunLog {
    visits: Vec<Visit>,
    seen: HashSet<u64>,
    starts: HashSet<GridPoint>,
    tracker: HaltTracker,
}

impl RunLog {
    pub(crate) fn new(cfg: &OptimizerConfig) -> Self {
        Self {
            visits: Vec::new(),
            seen: HashSet::new(),
            starts: cfg.starting_points.iter().cloned().collect(),
            tracker: HaltTracker::new(cfg.halt.clone()),
        }
    }

    /// Logs a completed lookup; only fresh evaluations reach the halt
    /// tracker. Returns the current halt decision.
    pub(crate) fn add(&mut self, lookup: &Lookup, arm: Option<usize>) -> Option<HaltReason> {
        if self.seen.insert(lookup.record.seq) {
            self.visits.push(Visit {
                record: EvalRecord::clone(&lookup.record),
                arm,
                fresh: lookup.fresh,
            });
            if lookup.fresh {
                let is_start = self.starts.contains(&lookup.record.point);
                self.tracker.observe(lookup.record.score, is_start);
            }
        }
        self.tracker.fired()
    }

    pub(crate) fn fired(&self) -> Option<HaltReason> {
        self.tracker.fired()
    }

    /// Builds the result: `q*` is the maximum score over all visits and `p*`
    /// the point of the earliest (lowest `seq`) visit achieving it.
    pub(crate) fn finish(
        self,
        optimizer: OptimizerKind,
        spacing: GridSpacing,
        wall_nanos: u64,
        halt_reason: HaltReason,
        arms: Vec<ArmSummary>,
    ) -> Result<SearchResult> {
        let best = self
            .visits
            .iter()
            .map(|v| &v.record)
            .min_by(|a, b| b.score.total_cmp(&a.score).then(a.seq.cmp(&b.seq)))
            .cloned()
            .ok_or_else(|| Error::Config("search finished without evaluating any point".into()))?;
        Ok(SearchResult {
            optimizer,
            best_weights: best.point.weights(spacing),
            best_point: best.point,
            best_score: best.score,
            best_features: best.selected_features,
            visits: self.visits,
            wall_nanos,
            halt_reason,
            arms,
        })
    }
}
