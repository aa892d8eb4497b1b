use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::{HaltReason, OptimizerConfig, OptimizerKind, RunLog, SearchResult};
use crate::error::Result;
use crate::evaluator::{EvalService, GridPoint, Objective};

/// Coordinate descent from `current` with score `best`.
///
/// For each dimension in order, the `+δ` then `-δ` shift is tried; the first
/// strict improvement becomes the current point and the scan restarts at
/// dimension 0. Stops after a full pass without improvement (`None`) or when
/// `eval` reports a halt.
fn descend<E>(mut current: GridPoint, mut best: f64, mut eval: E) -> Result<Option<HaltReason>>
where
    E: FnMut(&GridPoint) -> Result<(f64, Option<HaltReason>)>,
{
    'restart: loop {
        for dim in 0..current.dim() {
            for step in [1, -1] {
                let candidate = current.shifted(dim, step);
                let (score, halt) = eval(&candidate)?;
                if score > best {
                    best = score;
                    current = candidate;
                    if halt.is_some() {
                        return Ok(halt);
                    }
                    continue 'restart;
                }
                if halt.is_some() {
                    return Ok(halt);
                }
            }
        }
        return Ok(None);
    }
}

/// Sequential MeLiF: score every starting point, then run coordinate descent
/// from the best one (the first, on ties).
pub fn melif_descent<O: Objective>(service: &EvalService<O>, cfg: &OptimizerConfig) -> Result<SearchResult> {
    cfg.validate(service)?;
    let started = Instant::now();
    let mut log = RunLog::new(cfg);
    let mut eval = |p: &GridPoint| -> Result<(f64, Option<HaltReason>)> {
        let lookup = service.evaluate(p)?;
        let halt = log.add(&lookup, None);
        Ok((lookup.record.score, halt))
    };

    let mut current: Option<(GridPoint, f64)> = None;
    let mut halted = None;
    for p in &cfg.starting_points {
        let (score, halt) = eval(p)?;
        if current.as_ref().is_none_or(|(_, best)| score > *best) {
            current = Some((p.clone(), score));
        }
        if halt.is_some() {
            halted = halt;
            break;
        }
    }
    if halted.is_none() {
        let (start, score) = current.expect("validated non-empty starting points");
        halted = descend(start, score, &mut eval)?;
    }
    log.finish(
        OptimizerKind::Melif,
        cfg.spacing,
        started.elapsed().as_nanos() as u64,
        halted.unwrap_or(HaltReason::Converged),
        Vec::new(),
    )
}

/// MeLiF+: an independent coordinate descent per starting point, up to
/// `threads` at a time, all sharing the evaluation cache. The global best is
/// the best point any descent reached.
pub fn melif_plus<O: Objective>(service: &EvalService<O>, cfg: &OptimizerConfig) -> Result<SearchResult> {
    cfg.validate(service)?;
    let started = Instant::now();
    let log = Mutex::new(RunLog::new(cfg));
    let next_start = AtomicUsize::new(0);

    let worker = || -> Result<()> {
        loop {
            if log.lock().expect("run log poisoned").fired().is_some() {
                return Ok(());
            }
            let i = next_start.fetch_add(1, Ordering::SeqCst);
            let Some(start) = cfg.starting_points.get(i) else {
                return Ok(());
            };
            let mut eval = |p: &GridPoint| -> Result<(f64, Option<HaltReason>)> {
                let lookup = service.evaluate(p)?;
                let halt = log.lock().expect("run log poisoned").add(&lookup, None);
                Ok((lookup.record.score, halt))
            };
            let (score, halt) = eval(start)?;
            if halt.is_some() {
                return Ok(());
            }
            descend(start.clone(), score, &mut eval)?;
        }
    };

    let workers = cfg.threads.min(cfg.starting_points.len());
    if workers <= 1 {
        worker()?;
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|_| s.spawn(worker)).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("descent worker panicked"))
                .collect::<Result<Vec<()>>>()
        })?;
    }

    let log = log.into_inner().expect("run log poisoned");
    let reason = log.fired().unwrap_or(HaltReason::Converged);
    log.finish(
        OptimizerKind::MelifPlus,
        cfg.spacing,
        started.elapsed().as_nanos() as u64,
        reason,
        Vec::new(),
    )
}
