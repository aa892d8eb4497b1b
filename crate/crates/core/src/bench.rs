//! The experiment matrix: every configuration on every dataset, reported as
//! a time/F1 comparison table.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ManifestEntry};
use crate::error::{Error, Result};
use crate::evaluator::{CvObjective, EvalConfig, EvalService, GridSpacing};
use crate::filters::{FilterEnsemble, FilterParams, Measure};
use crate::optim::{self, default_starting_points, HaltReason, HaltSpec, OptimizerConfig, OptimizerKind};

/// Evaluations without a new best after which the `rel` configurations stop.
pub const RELATIVE_WINDOW: usize = 32;

/// A named optimizer + halting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub id: String,
    pub optimizer: OptimizerKind,
    pub halt: HaltSpec,
}

impl RunConfig {
    /// `B`, `P`, `PQ75`, `PQ100`, `PQ125`, `PQrel`, `MA75`, `MA100`, `MA125`, `MArel`.
    pub fn standard() -> Vec<RunConfig> {
        ["B", "P", "PQ75", "PQ100", "PQ125", "PQrel", "MA75", "MA100", "MA125", "MArel"]
            .iter()
            .map(|id| id.parse().expect("standard ids parse"))
            .collect()
    }

    pub fn parse_list(s: &str) -> Result<Vec<RunConfig>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::standard());
        }
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl std::str::FromStr for RunConfig {
    type Err = Error;

    /// `B` and `P` are sequential MeLiF and MeLiF+. `PQ<n>` / `MA<n>` cap the
    /// run at `n` completed evaluations; `PQrel` / `MArel` stop after
    /// [`RELATIVE_WINDOW`] evaluations without improvement.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown {
            kind: "configuration",
            name: s.to_string(),
        };
        let (optimizer, halt) = match s {
            "B" => (OptimizerKind::Melif, HaltSpec::default()),
            "P" => (OptimizerKind::MelifPlus, HaltSpec::default()),
            _ => {
                let (optimizer, rest) = if let Some(rest) = s.strip_prefix("PQ") {
                    (OptimizerKind::PriorityQueue, rest)
                } else if let Some(rest) = s.strip_prefix("MA") {
                    (OptimizerKind::Bandit, rest)
                } else {
                    return Err(unknown());
                };
                let halt = if rest == "rel" {
                    HaltSpec::stagnation(RELATIVE_WINDOW)
                } else {
                    match rest.parse::<usize>() {
                        Ok(n) if n > 0 => HaltSpec::max_points(n),
                        _ => return Err(unknown()),
                    }
                };
                (optimizer, halt)
            }
        };
        Ok(RunConfig {
            id: s.to_string(),
            optimizer,
            halt,
        })
    }
}

/// How many workers each cell gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreadSpec {
    Fixed(usize),
    /// Twice the number of starting points times the number of folds.
    TwoPf,
}

impl ThreadSpec {
    pub fn resolve(self, starting_points: usize, folds: usize) -> usize {
        match self {
            ThreadSpec::Fixed(n) => n.max(1),
            ThreadSpec::TwoPf => (2 * starting_points * folds).max(1),
        }
    }
}

impl std::str::FromStr for ThreadSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("2pf") {
            return Ok(ThreadSpec::TwoPf);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(ThreadSpec::Fixed(n)),
            _ => Err(Error::Config(format!("thread count must be a positive integer or 2pf, got {s:?}"))),
        }
    }
}

/// Settings shared by every cell of the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub threads: ThreadSpec,
    pub spacing: GridSpacing,
    pub eval: EvalConfig,
    pub measures: Vec<Measure>,
    pub filter: FilterParams,
    pub exploration: f64,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            threads: ThreadSpec::Fixed(optim::default_threads()),
            spacing: GridSpacing::default(),
            eval: EvalConfig::default(),
            measures: Measure::ALL.to_vec(),
            filter: FilterParams::default(),
            exploration: 1.0,
            seed: 0,
        }
    }
}

/// One (dataset, configuration) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub config: String,
    pub wall_seconds: f64,
    pub best_f1: f64,
    pub points_evaluated: usize,
    pub halt_reason: Option<HaltReason>,
    pub best_weights: Vec<f64>,
    pub best_features: Vec<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchMetadata {
    pub seed: u64,
    pub delta: f64,
    pub threads: usize,
    pub classifier: String,
    pub metric: String,
    pub measures: Vec<String>,
    pub m: usize,
    pub folds: usize,
    pub configs: Vec<String>,
    /// What the reported wall time covers.
    pub timing: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub metadata: BenchMetadata,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Dataset names in first-appearance order.
    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.dataset.as_str()) {
                out.push(&r.dataset);
            }
        }
        out
    }

    /// One line per dataset: `dataset`, then `time_<cfg>` for every
    /// configuration, then `f1_<cfg>` for every configuration. With
    /// `redact_time` the time cells read `-`; failed cells read `NA`.
    pub fn write_csv(&self, out: impl Write, redact_time: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Serialization(e.to_string());
        let configs = &self.metadata.configs;
        let mut header = vec!["dataset".to_string()];
        header.extend(configs.iter().map(|c| format!("time_{c}")));
        header.extend(configs.iter().map(|c| format!("f1_{c}")));
        w.write_record(&header).map_err(err)?;

        let cells: BTreeMap<(&str, &str), &BenchRow> = self
            .rows
            .iter()
            .map(|r| ((r.dataset.as_str(), r.config.as_str()), r))
            .collect();
        for ds in self.datasets() {
            let mut line = vec![ds.to_string()];
            let lookup = |c: &String| cells.get(&(ds, c.as_str())).copied().filter(|r| r.error.is_none());
            line.extend(configs.iter().map(|c| match lookup(c) {
                None => "NA".to_string(),
                Some(_) if redact_time => "-".to_string(),
                Some(r) => format!("{:.3}", r.wall_seconds),
            }));
            line.extend(configs.iter().map(|c| match lookup(c) {
                None => "NA".to_string(),
                Some(r) => format!("{:.4}", r.best_f1),
            }));
            w.write_record(&line).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Plain-text table for terminals.
    pub fn format_table(&self) -> String {
        let mut s = format!(
            "{:<28} {:<8} {:>10} {:>8} {:>7} {:<11}\n",
            "dataset", "config", "time [s]", "F1", "points", "halt"
        );
        for r in &self.rows {
            match &r.error {
                Some(e) => s.push_str(&format!("{:<28} {:<8} error: {e}\n", r.dataset, r.config)),
                None => s.push_str(&format!(
                    "{:<28} {:<8} {:>10.3} {:>8.4} {:>7} {:<11}\n",
                    r.dataset,
                    r.config,
                    r.wall_seconds,
                    r.best_f1,
                    r.points_evaluated,
                    r.halt_reason.map(|h| h.to_string()).unwrap_or_default()
                )),
            }
        }
        s
    }
}

fn error_row(dataset: &str, config: &RunConfig, error: &Error) -> BenchRow {
    BenchRow {
        dataset: dataset.to_string(),
        config: config.id.clone(),
        wall_seconds: 0.0,
        best_f1: 0.0,
        points_evaluated: 0,
        halt_reason: None,
        best_weights: Vec::new(),
        best_features: Vec::new(),
        error: Some(error.to_string()),
    }
}

/// Runs one configuration on one dataset with a fresh evaluation cache.
/// The clock covers filter precomputation and the search.
pub fn run_cell(ds: &Dataset, config: &RunConfig, opts: &BenchOptions) -> Result<BenchRow> {
    let started = Instant::now();
    let ensemble = FilterEnsemble::build(ds, &opts.measures, &opts.filter)?;
    let eval = EvalConfig {
        seed: opts.seed,
        ..opts.eval.clone()
    };
    let objective = CvObjective::new(ds, &ensemble, &eval)?;
    let service = EvalService::new(objective, opts.spacing);
    let starts = default_starting_points(ensemble.dim(), opts.spacing);
    let threads = opts.threads.resolve(starts.len(), opts.eval.folds);
    let cfg = OptimizerConfig {
        spacing: opts.spacing,
        starting_points: starts,
        threads,
        halt: config.halt.clone(),
        seed: opts.seed,
        exploration: opts.exploration,
    };
    let result = optim::run(config.optimizer, &service, &cfg)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    Ok(BenchRow {
        dataset: ds.name().to_string(),
        config: config.id.clone(),
        wall_seconds,
        best_f1: result.best_score,
        points_evaluated: result.points_evaluated(),
        halt_reason: Some(result.halt_reason),
        best_weights: result.best_weights,
        best_features: result.best_features,
        error: None,
    })
}

/// Every configuration on one loaded dataset, cells run one after another.
pub fn run_dataset(ds: &Dataset, configs: &[RunConfig], opts: &BenchOptions) -> Vec<BenchRow> {
    configs
        .iter()
        .map(|c| {
            log::info!("{}: running {}", ds.name(), c.id);
            run_cell(ds, c, opts).unwrap_or_else(|e| error_row(ds.name(), c, &e))
        })
        .collect()
}

/// Runs `configs` on every manifest entry. A dataset that fails to load
/// yields error rows for all of its cells; the others still run.
pub fn run_matrix(entries: &[ManifestEntry], configs: &[RunConfig], opts: &BenchOptions) -> Result<BenchReport> {
    if entries.is_empty() {
        return Err(Error::Config("manifest lists no datasets".into()));
    }
    let mut rows = Vec::new();
    for entry in entries {
        match entry.load() {
            Ok(ds) => rows.extend(run_dataset(&ds, configs, opts)),
            Err(e) => {
                log::error!("{}: {e}", entry.name());
                rows.extend(configs.iter().map(|c| error_row(&entry.name(), c, &e)));
            }
        }
    }
    Ok(BenchReport {
        metadata: metadata(configs, opts),
        rows,
    })
}

pub fn metadata(configs: &[RunConfig], opts: &BenchOptions) -> BenchMetadata {
    let starts = default_starting_points(opts.measures.len(), opts.spacing).len();
    BenchMetadata {
        seed: opts.seed,
        delta: opts.spacing.delta(),
        threads: opts.threads.resolve(starts, opts.eval.folds),
        classifier: opts.eval.classifier.to_string(),
        metric: format!("{:?}", opts.eval.metric).to_lowercase(),
        measures: opts.measures.iter().map(|m| m.name().to_string()).collect(),
        m: opts.eval.m,
        folds: opts.eval.folds,
        configs: configs.iter().map(|c| c.id.clone()).collect(),
        timing: "filter precomputation + search; excludes file I/O".into(),
    }
}
