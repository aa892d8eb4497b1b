//! Worker pool shared by the priority-queue and bandit searches.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Condvar, Mutex, MutexGuard};
use std::time::Instant;

use super::bandit::{ucb_select, ArmState, ArmSummary};
use super::queue::PointQueue;
use super::{neighbors, HaltReason, OptimizerConfig, OptimizerKind, RunLog, SearchResult};
use crate::error::{Error, Result};
use crate::evaluator::{EvalService, GridPoint, Lookup, Objective};

/// Priority given to starting points so they are all taken first.
const START_PRIORITY: f64 = 1.0;

/// Where pending points wait and how the next one is picked.
trait Frontier: Send {
    fn push(&mut self, arm: usize, point: GridPoint, priority: f64);

    /// Next unclaimed point and the arm it belongs to.
    fn pop(&mut self, claimed: &HashSet<GridPoint>) -> Option<(GridPoint, usize)>;

    /// Completed reward for `arm`.
    fn reward(&mut self, arm: usize, score: f64);

    fn arm_label(&self, arm: usize) -> Option<usize>;

    fn summaries(&self) -> Vec<ArmSummary>;
}

struct SingleQueue(PointQueue);

impl Frontier for SingleQueue {
    fn push(&mut self, _arm: usize, point: GridPoint, priority: f64) {
        self.0.push(point, priority);
    }

    fn pop(&mut self, claimed: &HashSet<GridPoint>) -> Option<(GridPoint, usize)> {
        self.0.pop_unclaimed(claimed).map(|(p, _)| (p, 0))
    }

    fn reward(&mut self, _arm: usize, _score: f64) {}

    fn arm_label(&self, _arm: usize) -> Option<usize> {
        None
    }

    fn summaries(&self) -> Vec<ArmSummary> {
        Vec::new()
    }
}

struct Bandit {
    arms: Vec<ArmState>,
    exploration: f64,
}

impl Frontier for Bandit {
    fn push(&mut self, arm: usize, point: GridPoint, priority: f64) {
        self.arms[arm].queue.push(point, priority);
    }

    fn pop(&mut self, claimed: &HashSet<GridPoint>) -> Option<(GridPoint, usize)> {
        for arm in &mut self.arms {
            arm.queue.prune(claimed);
        }
        let id = ucb_select(&self.arms, self.exploration).ok()?;
        self.arms[id].queue.pop_unclaimed(claimed).map(|(p, _)| (p, id))
    }

    fn reward(&mut self, arm: usize, score: f64) {
        self.arms[arm].record(score);
    }

    fn arm_label(&self, arm: usize) -> Option<usize> {
        Some(arm)
    }

    fn summaries(&self) -> Vec<ArmSummary> {
        self.arms.iter().map(ArmState::summary).collect()
    }
}

struct State<F> {
    frontier: F,
    /// Points taken by some worker; never dispatched again.
    claimed: HashSet<GridPoint>,
    in_flight: usize,
    /// Fresh completions, including those still waiting in `pending`.
    finished_fresh: usize,
    /// Fresh completions held back until every lower `seq` has arrived, so
    /// the halt tracker sees them in completion order.
    pending: BTreeMap<u64, (Lookup, Option<usize>)>,
    next_seq: u64,
    log: RunLog,
    halted: Option<HaltReason>,
    error: Option<Error>,
    max_points: Option<usize>,
}

impl<F: Frontier> State<F> {
    fn accept(&mut self, lookup: Lookup, arm: Option<usize>) {
        if !lookup.fresh {
            let fired = self.log.add(&lookup, arm);
            self.note(fired);
            return;
        }
        self.pending.insert(lookup.record.seq, (lookup, arm));
        self.drain(false);
    }

    /// Feeds in-order pending records to the log; `all` flushes across gaps,
    /// which is used once nothing is in flight.
    fn drain(&mut self, all: bool) {
        while let Some(entry) = self.pending.first_entry() {
            let seq = *entry.key();
            if !all && seq > self.next_seq {
                break;
            }
            let (lookup, arm) = entry.remove();
            self.next_seq = seq + 1;
            let fired = self.log.add(&lookup, arm);
            self.note(fired);
        }
    }

    fn note(&mut self, fired: Option<HaltReason>) {
        if self.halted.is_none() {
            self.halted = fired;
        }
    }

    /// True while dispatching another point could exceed `max_points`.
    fn budget_exhausted(&self) -> bool {
        self.max_points
            .is_some_and(|m| self.finished_fresh + self.in_flight >= m)
    }

    fn stopping(&self) -> bool {
        self.halted.is_some() || self.error.is_some()
    }
}

struct Pool<F> {
    state: Mutex<State<F>>,
    wake: Condvar,
}

impl<F: Frontier> Pool<F> {
    fn lock(&self) -> MutexGuard<'_, State<F>> {
        self.state.lock().expect("search state poisoned")
    }

    fn worker<O: Objective>(&self, service: &EvalService<O>) {
        let mut state = self.lock();
        loop {
            let (point, arm) = loop {
                if state.stopping() {
                    return;
                }
                if state.budget_exhausted() {
                    if state.in_flight == 0 {
                        // every budgeted evaluation is recorded; the tracker has fired
                        state.drain(true);
                        let reason = state.log.fired().unwrap_or(HaltReason::Limit);
                        state.note(Some(reason));
                        self.wake.notify_all();
                        return;
                    }
                    state = self.wake.wait(state).expect("search state poisoned");
                    continue;
                }
                let st = &mut *state;
                if let Some(next) = st.frontier.pop(&st.claimed) {
                    break next;
                }
                if state.in_flight == 0 {
                    state.drain(true);
                    state.note(Some(HaltReason::Exhausted));
                    self.wake.notify_all();
                    return;
                }
                state = self.wake.wait(state).expect("search state poisoned");
            };
            state.claimed.insert(point.clone());
            state.in_flight += 1;
            drop(state);

            let outcome = service.evaluate(&point);

            state = self.lock();
            state.in_flight -= 1;
            match outcome {
                Err(e) => {
                    if state.error.is_none() {
                        state.error = Some(e);
                    }
                }
                Ok(lookup) => {
                    let score = lookup.record.score;
                    if lookup.fresh {
                        state.finished_fresh += 1;
                    }
                    state.frontier.reward(arm, score);
                    if !state.stopping() {
                        let st = &mut *state;
                        for next in neighbors(&point) {
                            if !st.claimed.contains(&next) {
                                st.frontier.push(arm, next, score);
                            }
                        }
                    }
                    let label = state.frontier.arm_label(arm);
                    state.accept(lookup, label);
                }
            }
            if state.in_flight == 0 {
                state.drain(true);
            }
            self.wake.notify_all();
        }
    }
}

fn run_pool<O, F>(
    kind: OptimizerKind,
    service: &EvalService<O>,
    cfg: &OptimizerConfig,
    mut frontier: F,
    arm_of_start: impl Fn(usize) -> usize,
) -> Result<SearchResult>
where
    O: Objective,
    F: Frontier,
{
    cfg.validate(service)?;
    cfg.halt.validate_bounded()?;
    let started = Instant::now();
    for (i, p) in cfg.starting_points.iter().enumerate() {
        frontier.push(arm_of_start(i), p.clone(), START_PRIORITY);
    }
    let pool = Pool {
        state: Mutex::new(State {
            frontier,
            claimed: HashSet::new(),
            in_flight: 0,
            finished_fresh: 0,
            pending: BTreeMap::new(),
            next_seq: service.next_seq(),
            log: RunLog::new(cfg),
            halted: None,
            error: None,
            max_points: cfg.halt.max_points,
        }),
        wake: Condvar::new(),
    };
    if cfg.threads == 1 {
        pool.worker(service);
    } else {
        std::thread::scope(|s| {
            for _ in 0..cfg.threads {
                s.spawn(|| pool.worker(service));
            }
        });
    }
    let mut state = pool.state.into_inner().expect("search state poisoned");
    if let Some(e) = state.error {
        return Err(e);
    }
    state.drain(true);
    let reason = state.halted.or(state.log.fired()).unwrap_or(HaltReason::Exhausted);
    let arms = state.frontier.summaries();
    state.log.finish(
        kind,
        cfg.spacing,
        started.elapsed().as_nanos() as u64,
        reason,
        arms,
    )
}

/// PQMeLiF: best-first search with `threads` workers over one priority
/// queue.
///
/// Starting points enter with priority 1.0. A worker takes the
/// highest-priority unclaimed point (FIFO among equal priorities), evaluates
/// it, and enqueues its unclaimed neighbours with the evaluated score as
/// their priority. Halting is checked after each completion; evaluations
/// already in flight at that moment still complete and are recorded.
pub fn pq_melif<O: Objective>(service: &EvalService<O>, cfg: &OptimizerConfig) -> Result<SearchResult> {
    run_pool(
        OptimizerKind::PriorityQueue,
        service,
        cfg,
        SingleQueue(PointQueue::new()),
        |_| 0,
    )
}

/// MAMeLiF: one bandit arm per starting point, each owning a priority queue.
///
/// Neighbours inherit their parent's arm. Workers pick an arm with
/// [`ucb_select`] using completed rewards only, then proceed as in
/// [`pq_melif`] inside that arm's queue. The claimed set is global, so a
/// point is evaluated once no matter how many arms reach it.
pub fn ma_melif<O: Objective>(service: &EvalService<O>, cfg: &OptimizerConfig) -> Result<SearchResult> {
    let arms = (0..cfg.starting_points.len()).map(ArmState::new).collect();
    run_pool(
        OptimizerKind::Bandit,
        service,
        cfg,
        Bandit {
            arms,
            exploration: cfg.exploration,
        },
        |i| i,
    )
}
