//! Point evaluation: grid points, classifiers, metrics, objectives, and the
//! shared evaluation service that caches every point's score.

pub mod classifier;
mod grid;
pub mod metrics;
mod objective;

pub use classifier::{Classifier, ClassifierKind, Knn, Model, NearestCentroid};
pub use grid::{GridPoint, GridSpacing};
pub use metrics::{f1_for_class, f1_macro, Metric};
pub use objective::{CvObjective, EvalConfig, Objective, Outcome, StubObjective};

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of evaluating one grid point. Immutable once published.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub point: GridPoint,
    pub weights: Vec<f64>,
    pub score: f64,
    pub selected_features: Vec<usize>,
    pub wall_nanos: u64,
    /// Completion order within the owning [`EvalService`], dense from 0.
    pub seq: u64,
}

/// What [`EvalService::evaluate`] handed back.
#[derive(Debug, Clone)]
pub struct Lookup {
    pub record: Arc<EvalRecord>,
    /// `true` only for the caller whose request actually ran the objective.
    pub fresh: bool,
}

type Slot = Arc<OnceLock<Result<Arc<EvalRecord>>>>;

/// Evaluates grid points through an [`Objective`], at most once per point.
///
/// Concurrent requests for the same point coalesce: one caller computes,
/// the others block until the record is published. Failures are cached too.
pub struct EvalService<O> {
    objective: O,
    spacing: GridSpacing,
    cache: Mutex<HashMap<GridPoint, Slot>>,
    next_seq: AtomicU64,
    computations: AtomicU64,
}

impl<O: Objective> EvalService<O> {
    pub fn new(objective: O, spacing: GridSpacing) -> Self {
        Self {
            objective,
            spacing,
            cache: Mutex::new(HashMap::new()),
            next_seq: AtomicU64::new(0),
            computations: AtomicU64::new(0),
        }
    }

    pub fn spacing(&self) -> GridSpacing {
        self.spacing
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    /// Number of times the objective has been invoked.
    pub fn computations(&self) -> u64 {
        self.computations.load(Ordering::SeqCst)
    }

    /// Sequence number the next completed evaluation will receive.
    pub fn next_seq(&self) -> u64 {
        self.next_seq.load(Ordering::SeqCst)
    }

    /// Returns the record for `point`, computing it if no one has yet.
    pub fn evaluate(&self, point: &GridPoint) -> Result<Lookup> {
        if point.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: point.dim(),
            });
        }
        let slot = {
            let mut cache = self.cache.lock().expect("evaluation cache poisoned");
            Arc::clone(cache.entry(point.clone()).or_default())
        };
        let mut fresh = false;
        let outcome = slot.get_or_init(|| {
            fresh = true;
            self.compute(point)
        });
        outcome.clone().map(|record| Lookup { record, fresh })
    }

    /// Cached record for `point`, if it has completed.
    pub fn cached(&self, point: &GridPoint) -> Option<Arc<EvalRecord>> {
        let slot = self.cache.lock().expect("evaluation cache poisoned").get(point).cloned()?;
        slot.get().and_then(|r| r.as_ref().ok().cloned())
    }

    /// Every completed record, in completion order.
    pub fn records(&self) -> Vec<Arc<EvalRecord>> {
        let cache = self.cache.lock().expect("evaluation cache poisoned");
        let mut out: Vec<Arc<EvalRecord>> = cache
            .values()
            .filter_map(|slot| slot.get().and_then(|r| r.as_ref().ok().cloned()))
            .collect();
        out.sort_by_key(|r| r.seq);
        out
    }

    fn compute(&self, point: &GridPoint) -> Result<Arc<EvalRecord>> {
        self.computations.fetch_add(1, Ordering::SeqCst);
        let weights = point.weights(self.spacing);
        let start = Instant::now();
        let outcome = self.objective.evaluate(&weights)?;
        let wall_nanos = start.elapsed().as_nanos() as u64;
        if !outcome.score.is_finite() {
            return Err(Error::Config(format!(
                "objective returned non-finite score at {point}"
            )));
        }
        Ok(Arc::new(EvalRecord {
            point: point.clone(),
            weights,
            score: outcome.score,
            selected_features: outcome.selected_features,
            wall_nanos,
            seq: self.next_seq.fetch_add(1, Ordering::SeqCst),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;
    use std::time::Duration;

    #[test]
    fn second_call_hits_cache() {
        let svc = EvalService::new(StubObjective::new(2, |w| w[0] + w[1]), GridSpacing::default());
        let p = GridPoint::new(vec![4, 1]);
        let a = svc.evaluate(&p).unwrap();
        let b = svc.evaluate(&p).unwrap();
        assert!(a.fresh && !b.fresh);
        assert_eq!(a.record, b.record);
        assert_eq!(a.record.score, 1.25);
        assert_eq!(svc.computations(), 1);
        let q = svc.evaluate(&GridPoint::new(vec![0, 0])).unwrap();
        assert_eq!(q.record.seq, 1);
    }

    #[test]
    fn concurrent_requests_coalesce() {
        let calls = AtomicUsize::new(0);
        let stub = StubObjective::new(1, |w| {
            calls.fetch_add(1, Ordering::SeqCst);
            w[0]
        })
        .with_sleep(Duration::from_millis(30));
        let svc = EvalService::new(stub, GridSpacing::default());
        let p = GridPoint::new(vec![3]);
        let fresh_count = std::thread::scope(|s| {
            let handles: Vec<_> = (0..8).map(|_| s.spawn(|| svc.evaluate(&p).unwrap())).collect();
            handles.into_iter().map(|h| h.join().unwrap().fresh as usize).sum::<usize>()
        });
        assert_eq!(fresh_count, 1);
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        assert_eq!(svc.records().len(), 1);
    }

    #[test]
    fn dimension_checked() {
        let svc = EvalService::new(StubObjective::new(2, |_| 0.0), GridSpacing::default());
        assert!(matches!(
            svc.evaluate(&GridPoint::new(vec![1])),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn failures_are_cached() {
        let svc = EvalService::new(StubObjective::new(1, |_| f64::NAN), GridSpacing::default());
        let p = GridPoint::new(vec![0]);
        assert!(svc.evaluate(&p).is_err());
        assert!(svc.evaluate(&p).is_err());
        assert_eq!(svc.computations(), 1);
    }
}
